/*
 * Copyright 2026 The dpfl-pareto Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DPFL_SVG_PLOT_H_
#define DPFL_SVG_PLOT_H_

#include <string>
#include <utility>
#include <vector>

namespace dpfl {

struct PlotSeries {
  enum class Style { kScatter, kLine };

  std::string label;
  Style style = Style::kScatter;
  std::string color = "#000000";
  std::vector<std::pair<double, double>> points;  // (x, y); non-finite skipped
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 640;
  int height = 480;
  bool log_x = false;  // non-positive values are skipped on log axes
  bool log_y = false;
  std::vector<PlotSeries> series;
};

// Standalone SVG document: frame, five ticks per axis, one entry per series
// in the legend. Output depends only on `spec`.
std::string RenderSvg(const PlotSpec& spec);

}  // namespace dpfl

#endif  // DPFL_SVG_PLOT_H_
