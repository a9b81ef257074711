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

#include "dpfl/svg_plot.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace dpfl {
namespace {

constexpr double kMarginLeft = 70;
constexpr double kMarginRight = 20;
constexpr double kMarginTop = 40;
constexpr double kMarginBottom = 55;
constexpr int kTicks = 5;

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

struct Axis {
  bool log = false;
  double lo = 0.0;
  double hi = 1.0;

  double Map(double v) const { return log ? std::log10(v) : v; }
  bool Accepts(double v) const { return std::isfinite(v) && (!log || v > 0); }
  // Position in [0, 1].
  double Frac(double v) const { return (Map(v) - lo) / (hi - lo); }
  double TickValue(int i) const {
    const double m = lo + (hi - lo) * i / (kTicks - 1);
    return log ? std::pow(10.0, m) : m;
  }
};

}  // namespace

std::string RenderSvg(const PlotSpec& spec) {
  Axis ax{spec.log_x};
  Axis ay{spec.log_y};
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const PlotSeries& s : spec.series) {
    for (auto [x, y] : s.points) {
      if (!ax.Accepts(x) || !ay.Accepts(y)) continue;
      x_lo = std::min(x_lo, ax.Map(x));
      x_hi = std::max(x_hi, ax.Map(x));
      y_lo = std::min(y_lo, ay.Map(y));
      y_hi = std::max(y_hi, ay.Map(y));
    }
  }
  if (!(x_lo <= x_hi)) x_lo = 0, x_hi = 1;
  if (!(y_lo <= y_hi)) y_lo = 0, y_hi = 1;
  if (x_hi == x_lo) x_lo -= 0.5, x_hi += 0.5;
  if (y_hi == y_lo) y_lo -= 0.5, y_hi += 0.5;
  ax.lo = x_lo, ax.hi = x_hi;
  ay.lo = y_lo, ay.hi = y_hi;

  const double w = spec.width, h = spec.height;
  const double pw = w - kMarginLeft - kMarginRight;
  const double ph = h - kMarginTop - kMarginBottom;
  auto px = [&](double x) { return kMarginLeft + ax.Frac(x) * pw; };
  auto py = [&](double y) { return kMarginTop + (1.0 - ay.Frac(y)) * ph; };

  std::string out;
  absl::StrAppendFormat(
      &out,
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
      "viewBox=\"0 0 %d %d\" font-family=\"sans-serif\" font-size=\"12\">\n",
      spec.width, spec.height, spec.width, spec.height);
  absl::StrAppendFormat(&out,
                        "<rect width=\"%d\" height=\"%d\" fill=\"white\"/>\n",
                        spec.width, spec.height);
  absl::StrAppendFormat(&out,
                        "<text x=\"%.1f\" y=\"20\" text-anchor=\"middle\" "
                        "font-size=\"14\">%s</text>\n",
                        w / 2, Escape(spec.title));
  absl::StrAppendFormat(&out,
                        "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" "
                        "height=\"%.1f\" fill=\"none\" stroke=\"black\"/>\n",
                        kMarginLeft, kMarginTop, pw, ph);

  for (int i = 0; i < kTicks; ++i) {
    const double tx = ax.TickValue(i);
    const double ty = ay.TickValue(i);
    const double gx = px(tx), gy = py(ty);
    absl::StrAppendFormat(&out,
                          "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" "
                          "y2=\"%.1f\" stroke=\"black\"/>\n",
                          gx, kMarginTop + ph, gx, kMarginTop + ph + 5);
    absl::StrAppendFormat(&out,
                          "<text x=\"%.1f\" y=\"%.1f\" "
                          "text-anchor=\"middle\">%.4g</text>\n",
                          gx, kMarginTop + ph + 18, tx);
    absl::StrAppendFormat(&out,
                          "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" "
                          "y2=\"%.1f\" stroke=\"black\"/>\n",
                          kMarginLeft - 5, gy, kMarginLeft, gy);
    absl::StrAppendFormat(&out,
                          "<text x=\"%.1f\" y=\"%.1f\" "
                          "text-anchor=\"end\">%.4g</text>\n",
                          kMarginLeft - 8, gy + 4, ty);
  }
  absl::StrAppendFormat(&out,
                        "<text x=\"%.1f\" y=\"%.1f\" "
                        "text-anchor=\"middle\">%s</text>\n",
                        kMarginLeft + pw / 2, h - 12, Escape(spec.x_label));
  absl::StrAppendFormat(&out,
                        "<text x=\"16\" y=\"%.1f\" text-anchor=\"middle\" "
                        "transform=\"rotate(-90 16 %.1f)\">%s</text>\n",
                        kMarginTop + ph / 2, kMarginTop + ph / 2,
                        Escape(spec.y_label));

  for (const PlotSeries& s : spec.series) {
    const std::string color = Escape(s.color);
    if (s.style == PlotSeries::Style::kLine) {
      std::string pts;
      for (auto [x, y] : s.points) {
        if (!ax.Accepts(x) || !ay.Accepts(y)) continue;
        absl::StrAppendFormat(&pts, "%s%.2f,%.2f", pts.empty() ? "" : " ",
                              px(x), py(y));
      }
      absl::StrAppendFormat(&out,
                            "<polyline points=\"%s\" fill=\"none\" "
                            "stroke=\"%s\" stroke-width=\"2\"/>\n",
                            pts, color);
    } else {
      for (auto [x, y] : s.points) {
        if (!ax.Accepts(x) || !ay.Accepts(y)) continue;
        absl::StrAppendFormat(&out,
                              "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" "
                              "fill=\"%s\"/>\n",
                              px(x), py(y), color);
      }
    }
  }

  double ly = kMarginTop + 14;
  for (const PlotSeries& s : spec.series) {
    const double lx = kMarginLeft + pw - 130;
    const std::string color = Escape(s.color);
    if (s.style == PlotSeries::Style::kLine) {
      absl::StrAppendFormat(&out,
                            "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" "
                            "y2=\"%.1f\" stroke=\"%s\" stroke-width=\"2\"/>\n",
                            lx, ly - 4, lx + 20, ly - 4, color);
    } else {
      absl::StrAppendFormat(
          &out, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"%s\"/>\n",
          lx + 10, ly - 4, color);
    }
    absl::StrAppendFormat(&out, "<text x=\"%.1f\" y=\"%.1f\">%s</text>\n",
                          lx + 26, ly, Escape(s.label));
    ly += 16;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace dpfl
