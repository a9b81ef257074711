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

#ifndef DPFL_PARETO_H_
#define DPFL_PARETO_H_

#include <functional>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpfl/objectives.h"

namespace dpfl {

// a is no worse than b in both objectives and strictly better in one.
bool Dominates(const ObjectivePoint& a, const ObjectivePoint& b);

struct ParetoSet {
  // Ordered by increasing utility (so decreasing privacy).
  std::vector<ObjectivePoint> members;
  // Inputs dominated by at least one member.
  int dominated_count = 0;
  // Inputs dropped because a member has exactly the same objectives.
  int duplicate_count = 0;
};

// Non-dominated filter. Points with identical (utility, privacy) keep one
// representative, the one with the smallest (T, sigma, q) origin.
//
// Runs a sort-and-sweep in O(n log n); equivalent to the pairwise definition
// for two objectives.
ParetoSet NonDominatedSort(std::span<const ObjectivePoint> points);

// Orders points by (q, sigma, T).
void SortCanonical(std::vector<ObjectivePoint>& points);

// Evaluates one (q, sigma) cell for every T in [1, max_rounds]. An empirical
// evaluator runs one simulation per cell and reads all rounds off its trace.
using CellEvaluator = std::function<absl::StatusOr<std::vector<ObjectivePoint>>(
    double sample_ratio, double sigma, int max_rounds)>;
using PointEvaluator =
    std::function<absl::StatusOr<ObjectivePoint>(const ParamPoint&)>;

// Lifts a per-point evaluator (such as the theoretical objectives) to cells.
CellEvaluator EvaluatePointwise(PointEvaluator evaluator);

struct CellFailure {
  double sample_ratio = 0.0;
  double sigma = 0.0;
  absl::Status status;
};

struct GridResult {
  // Canonically ordered; only feasible T.
  std::vector<ObjectivePoint> points;
  std::vector<CellFailure> failures;
  int cells_evaluated = 0;
};

// Evaluates every (q, sigma) cell for T in [1, tp.MaxRounds()], on up to
// `jobs` threads. A failing cell contributes no points and is listed in
// `failures`. InvalidArgument for empty grids or an infeasible budget.
absl::StatusOr<GridResult> GridSearch(std::span<const double> q_list,
                                      std::span<const double> sigma_list,
                                      const TheoryParams& tp,
                                      const CellEvaluator& evaluator,
                                      int jobs = 1);

}  // namespace dpfl

#endif  // DPFL_PARETO_H_
