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

#ifndef DPFL_THEORY_H_
#define DPFL_THEORY_H_

#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dpfl/objectives.h"

namespace dpfl {

// Regimes of the closed-form Pareto solution at fixed q.
enum class SolutionCase {
  kUnconstrained,  // no upper bound on sigma
  kWideSigma,      // k * sigma_max^2 * T_max >  q * K
  kTightSigma,     // k * sigma_max^2 * T_max <= q * K
};

absl::string_view SolutionCaseName(SolutionCase c);

SolutionCase ClassifyCase(double sample_ratio, int num_clients, double k,
                          std::optional<double> sigma_max, int max_rounds);

// k * sigma^2 * T - q * K; zero on the Pareto manifold.
double ManifoldResidual(const ParamPoint& point, double k, int num_clients);

enum class SigmaRule {
  kFixed,     // sigma = sigma_hi
  kCurve,     // sigma = sqrt(q K / (k T))
  kInterval,  // any sigma in [sigma_lo, sigma_hi]
};

absl::string_view SigmaRuleName(SigmaRule rule);

struct SolutionSegment {
  int first_round = 1;  // inclusive
  int last_round = 1;   // inclusive
  SigmaRule rule = SigmaRule::kCurve;
  double sigma_lo = 0.0;
  double sigma_hi = 0.0;     // +inf for the unconstrained single-round interval
  double curve_scale = 0.0;  // q K / k

  // Pareto-optimal sigma at round T. For intervals, the upper end.
  double RepresentativeSigma(int rounds) const;
};

// Segments tiling [1, T_max]:
//   unconstrained: one curve segment.
//   wide sigma: sigma_max on [1, n-], curve on [n+, T_max - 1], interval
//     [0, sqrt(qK/(k T_max))] at T_max, with n = qK/(k sigma_max^2). When n is
//     an integer the curve takes round n (both rules agree there).
//   tight sigma: sigma_max on [1, T_max - 1], interval [0, sigma_max] at
//     T_max.
// With T_max == 1 the answer is a single interval at T = 1.
std::vector<SolutionSegment> AnalyticalSolutions(
    double sample_ratio, int num_clients, double k,
    std::optional<double> sigma_max, int max_rounds);

// qK / (k sigma_max^2): the round where sigma_max meets the curve.
double CurveBreakpoint(double sample_ratio, int num_clients, double k,
                       double sigma_max);

// floor of CurveBreakpoint, with values within 1e-9 (relative) of an integer
// taken as that integer.
long CurveBreakpointFloor(double sample_ratio, int num_clients, double k,
                          double sigma_max);

// X = 1/T + (k/K) * sigma^2 / q. Same value as UtilityF1.
double XTransform(int rounds, double sigma, double sample_ratio, double k,
                  int num_clients);

// 2 sqrt(k) / (sqrt(K) X): the least f2 reachable at utility level X.
double TheoreticalFront(double x, double k, int num_clients);

// floor(budget / c_t). InvalidArgument when the budget does not cover one
// round.
absl::StatusOr<int> DesignMaxRounds(double efficiency_budget,
                                    double round_time);

}  // namespace dpfl

#endif  // DPFL_THEORY_H_
