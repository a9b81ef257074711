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

#ifndef DPFL_IO_H_
#define DPFL_IO_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dpfl/design.h"
#include "dpfl/objectives.h"
#include "dpfl/pareto.h"
#include "dpfl/theory.h"
#include "json.hpp"

namespace dpfl {

// Shortest decimal form that parses back to the same double ("inf" for
// infinity).
std::string FormatDouble(double v);
absl::StatusOr<double> ParseDouble(absl::string_view text);

// Writes to `path` through a temporary sibling and a rename, so readers never
// see a half-written file.
absl::Status WriteFileAtomic(const std::string& path, absl::string_view data);
absl::StatusOr<std::string> ReadFile(const std::string& path);

// round,mean_test_loss,n_participants with rounds numbered from 1.
std::string TraceCsv(std::span<const double> test_loss, int participants);

// One row of an objective table.
struct ObjectiveRow {
  ObjectivePoint point;
  double efficiency = 0.0;
  bool feasible = true;
};

std::vector<ObjectiveRow> MakeObjectiveRows(
    std::span<const ObjectivePoint> points, const TheoryParams& tp);

// Header T,sigma,q,utility,privacy,efficiency,feasible; feasible is 0 or 1.
std::string ObjectiveCsv(std::span<const ObjectiveRow> rows);
// `source` is recorded on every parsed point. InvalidArgument on a bad
// header or malformed row (the message names the line).
absl::StatusOr<std::vector<ObjectiveRow>> ParseObjectiveCsv(
    absl::string_view text, ObjectiveSource source);

// Array of {T, sigma, q, utility, privacy} in member order. Infinite values
// are written as the string "inf".
nlohmann::json ParetoJson(std::span<const ObjectivePoint> members);
absl::StatusOr<std::vector<ObjectivePoint>> ParseParetoJson(
    const nlohmann::json& j, ObjectiveSource source);

nlohmann::json FittedLawJson(const FittedLaw& law);
absl::StatusOr<FittedLaw> ParseFittedLawJson(const nlohmann::json& j);

// Segments with their T range, rule and sigma bounds, in both (sigma, T) and
// (sigma^2/q, T) coordinates.
nlohmann::json SegmentsJson(std::span<const SolutionSegment> segments,
                            double sample_ratio);

nlohmann::json ComplexityReportJson(const ComplexityReport& report);

// Serializes with two-space indentation and a trailing newline.
std::string DumpJson(const nlohmann::json& j);

}  // namespace dpfl

#endif  // DPFL_IO_H_
