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

#include "dpfl/pareto.h"

#include <algorithm>
#include <tuple>

#include "absl/strings/str_cat.h"
#include "dpfl/parallel.h"

namespace dpfl {

bool Dominates(const ObjectivePoint& a, const ObjectivePoint& b) {
  return a.utility <= b.utility && a.privacy <= b.privacy &&
         (a.utility < b.utility || a.privacy < b.privacy);
}

ParetoSet NonDominatedSort(std::span<const ObjectivePoint> points) {
  std::vector<const ObjectivePoint*> order;
  order.reserve(points.size());
  for (const ObjectivePoint& p : points) order.push_back(&p);
  std::sort(order.begin(), order.end(),
            [](const ObjectivePoint* a, const ObjectivePoint* b) {
              return std::tie(a->utility, a->privacy, a->origin) <
                     std::tie(b->utility, b->privacy, b->origin);
            });

  ParetoSet out;
  // Smallest privacy seen among points with strictly smaller utility.
  double best_privacy = kInfiniteLeakage;
  bool have_best = false;
  size_t i = 0;
  while (i < order.size()) {
    size_t group_end = i;
    while (group_end < order.size() &&
           order[group_end]->utility == order[i]->utility) {
      ++group_end;
    }
    // The group head has the lowest privacy among equal utilities.
    const ObjectivePoint& head = *order[i];
    const bool head_dominated = have_best && best_privacy <= head.privacy;
    if (!head_dominated) out.members.push_back(head);
    for (size_t j = i; j < group_end; ++j) {
      if (j == i) {
        if (head_dominated) ++out.dominated_count;
      } else if (!head_dominated && order[j]->privacy == head.privacy) {
        ++out.duplicate_count;
      } else {
        ++out.dominated_count;
      }
    }
    if (!have_best || head.privacy < best_privacy) {
      best_privacy = head.privacy;
      have_best = true;
    }
    i = group_end;
  }
  return out;
}

void SortCanonical(std::vector<ObjectivePoint>& points) {
  std::sort(points.begin(), points.end(),
            [](const ObjectivePoint& a, const ObjectivePoint& b) {
              return std::tie(a.origin.sample_ratio, a.origin.sigma,
                              a.origin.rounds) < std::tie(b.origin.sample_ratio,
                                                          b.origin.sigma,
                                                          b.origin.rounds);
            });
}

CellEvaluator EvaluatePointwise(PointEvaluator evaluator) {
  return [evaluator = std::move(evaluator)](
             double q, double sigma,
             int max_rounds) -> absl::StatusOr<std::vector<ObjectivePoint>> {
    std::vector<ObjectivePoint> out;
    out.reserve(max_rounds);
    for (int t = 1; t <= max_rounds; ++t) {
      auto p = evaluator(ParamPoint{t, sigma, q});
      if (!p.ok()) return p.status();
      out.push_back(*p);
    }
    return out;
  };
}

absl::StatusOr<GridResult> GridSearch(std::span<const double> q_list,
                                      std::span<const double> sigma_list,
                                      const TheoryParams& tp,
                                      const CellEvaluator& evaluator,
                                      int jobs) {
  if (q_list.empty() || sigma_list.empty()) {
    return absl::InvalidArgumentError("q and sigma grids must be non-empty");
  }
  const int max_rounds = tp.MaxRounds();
  if (max_rounds < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("efficiency budget ", tp.efficiency_budget,
                     " admits no round at c_t=", tp.round_time));
  }
  struct Cell {
    double q;
    double sigma;
  };
  std::vector<Cell> cells;
  for (double q : q_list) {
    for (double sigma : sigma_list) cells.push_back({q, sigma});
  }
  std::vector<absl::StatusOr<std::vector<ObjectivePoint>>> results(
      cells.size(), absl::UnknownError("not evaluated"));
  ParallelFor(cells.size(), jobs, [&](size_t i) {
    results[i] = evaluator(cells[i].q, cells[i].sigma, max_rounds);
  });

  GridResult out;
  out.cells_evaluated = static_cast<int>(cells.size());
  for (size_t i = 0; i < cells.size(); ++i) {
    if (!results[i].ok()) {
      out.failures.push_back({cells[i].q, cells[i].sigma, results[i].status()});
      continue;
    }
    for (const ObjectivePoint& p : *results[i]) {
      if (IsFeasible(p.origin.rounds, tp)) out.points.push_back(p);
    }
  }
  SortCanonical(out.points);
  return out;
}

}  // namespace dpfl
