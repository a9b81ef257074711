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

#ifndef DPFL_OBJECTIVES_H_
#define DPFL_OBJECTIVES_H_

#include <limits>
#include <optional>
#include <span>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace dpfl {

// A point of the decision space.
struct ParamPoint {
  int rounds = 1;             // T
  double sigma = 0.0;         // noise level
  double sample_ratio = 1.0;  // q

  // Lexicographic (T, sigma, q); used to break ties between duplicates.
  friend auto operator<=>(const ParamPoint&, const ParamPoint&) = default;
};

enum class ObjectiveSource { kEmpirical, kTheoretical };

absl::string_view ObjectiveSourceName(ObjectiveSource source);

// (utility, privacy) pair, both minimized.
struct ObjectivePoint {
  double utility = 0.0;
  double privacy = 0.0;
  ObjectiveSource source = ObjectiveSource::kTheoretical;
  ParamPoint origin;
};

// Returned for sigma == 0. Any finite leakage beats it.
inline constexpr double kInfiniteLeakage =
    std::numeric_limits<double>::infinity();

struct PrivacyParams {
  double accountant_constant = 1.0;  // C
  double clip = 1.0;                 // c_clip
  double delta = 1e-5;
  int num_clients = 1;  // K
};

absl::Status ValidatePrivacyParams(const PrivacyParams& p);

struct TheoryParams {
  double k = 1.0;
  int num_clients = 1;             // K
  double round_time = 1.0;         // c_t
  double efficiency_budget = 1.0;  // upper bound on c_t * T

  // floor(efficiency_budget / round_time).
  int MaxRounds() const;
};

absl::Status ValidateTheoryParams(const TheoryParams& tp);

// C * c_clip * sqrt(q * T * ln(1/delta)) / (sqrt(K) * sigma).
double PrivacyLeakage(int rounds, double sigma, double sample_ratio,
                      const PrivacyParams& p);

// 1/T + k * sigma^2 / (q * K).
double UtilityF1(int rounds, double sigma, double sample_ratio,
                 const TheoryParams& tp);

// sqrt(q * T) / sigma.
double PrivacyF2(int rounds, double sigma, double sample_ratio);

// c_t * T.
double Efficiency(int rounds, double round_time);

bool IsFeasible(int rounds, const TheoryParams& tp);

struct ConvergenceBoundInputs {
  int rounds = 1;
  int local_epochs = 1;
  double learning_rate = 0.01;
  double sigma = 0.0;
  double sample_ratio = 1.0;
  int num_clients = 1;
};

// a1 * (1/(eta E T) + eta^2 E^2 + eta) + a2 * sigma^2 / (eta q K E): the
// convergence bound on the average squared gradient norm, with the two
// big-O constants supplied by the caller.
double ConvergenceBound(const ConvergenceBoundInputs& in, double a1, double a2);

// Test loss after T rounds: trace[T-1], or trace[T-1] - baseline[T-1] when a
// noise-free baseline trace is given. OutOfRange when T is not in
// [1, trace.size()].
absl::StatusOr<double> EmpiricalUtility(
    std::span<const double> trace, int rounds,
    std::optional<std::span<const double>> baseline = std::nullopt);

// Theoretical objective point (f1, f2) for a decision.
ObjectivePoint TheoreticalObjective(const ParamPoint& point,
                                    const TheoryParams& tp);

}  // namespace dpfl

#endif  // DPFL_OBJECTIVES_H_
