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

#include "dpfl/objectives.h"

#include <cmath>

#include "absl/strings/str_cat.h"

namespace dpfl {

absl::string_view ObjectiveSourceName(ObjectiveSource source) {
  return source == ObjectiveSource::kEmpirical ? "empirical" : "theoretical";
}

absl::Status ValidatePrivacyParams(const PrivacyParams& p) {
  if (!(p.accountant_constant > 0.0)) {
    return absl::InvalidArgumentError("accountant constant C must be > 0");
  }
  if (!(p.clip > 0.0)) {
    return absl::InvalidArgumentError("clipping constant must be > 0");
  }
  if (!(p.delta > 0.0 && p.delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta=", p.delta, " outside (0,1)"));
  }
  if (p.num_clients < 1) {
    return absl::InvalidArgumentError("K must be at least 1");
  }
  return absl::OkStatus();
}

int TheoryParams::MaxRounds() const {
  return static_cast<int>(std::floor(efficiency_budget / round_time));
}

absl::Status ValidateTheoryParams(const TheoryParams& tp) {
  if (!(tp.k > 0.0)) return absl::InvalidArgumentError("k must be > 0");
  if (tp.num_clients < 1) {
    return absl::InvalidArgumentError("K must be at least 1");
  }
  if (!(tp.round_time > 0.0)) {
    return absl::InvalidArgumentError("per-round time c_t must be > 0");
  }
  if (!(tp.efficiency_budget >= tp.round_time)) {
    return absl::InvalidArgumentError(
        absl::StrCat("efficiency budget ", tp.efficiency_budget,
                     " is below one round (c_t=", tp.round_time, ")"));
  }
  return absl::OkStatus();
}

double PrivacyLeakage(int rounds, double sigma, double sample_ratio,
                      const PrivacyParams& p) {
  if (sigma == 0.0) return kInfiniteLeakage;
  return p.accountant_constant * p.clip *
         std::sqrt(sample_ratio * rounds * std::log(1.0 / p.delta)) /
         (std::sqrt(static_cast<double>(p.num_clients)) * sigma);
}

double UtilityF1(int rounds, double sigma, double sample_ratio,
                 const TheoryParams& tp) {
  return 1.0 / rounds + tp.k * sigma * sigma / (sample_ratio * tp.num_clients);
}

double PrivacyF2(int rounds, double sigma, double sample_ratio) {
  if (sigma == 0.0) return kInfiniteLeakage;
  return std::sqrt(sample_ratio * rounds) / sigma;
}

double Efficiency(int rounds, double round_time) { return round_time * rounds; }

bool IsFeasible(int rounds, const TheoryParams& tp) {
  return rounds >= 1 && rounds <= tp.MaxRounds();
}

double ConvergenceBound(const ConvergenceBoundInputs& in, double a1,
                        double a2) {
  const double eta = in.learning_rate;
  const double e = in.local_epochs;
  const double optimization =
      1.0 / (eta * e * in.rounds) + eta * eta * e * e + eta;
  const double noise =
      in.sigma * in.sigma / (eta * in.sample_ratio * in.num_clients * e);
  return a1 * optimization + a2 * noise;
}

absl::StatusOr<double> EmpiricalUtility(
    std::span<const double> trace, int rounds,
    std::optional<std::span<const double>> baseline) {
  if (rounds < 1 || static_cast<size_t>(rounds) > trace.size()) {
    return absl::OutOfRangeError(absl::StrCat(
        "round ", rounds, " outside the trace of length ", trace.size()));
  }
  const double loss = trace[rounds - 1];
  if (!baseline.has_value()) return loss;
  if (static_cast<size_t>(rounds) > baseline->size()) {
    return absl::OutOfRangeError(
        absl::StrCat("round ", rounds, " outside the baseline of length ",
                     baseline->size()));
  }
  return loss - (*baseline)[rounds - 1];
}

ObjectivePoint TheoreticalObjective(const ParamPoint& point,
                                    const TheoryParams& tp) {
  return ObjectivePoint{
      UtilityF1(point.rounds, point.sigma, point.sample_ratio, tp),
      PrivacyF2(point.rounds, point.sigma, point.sample_ratio),
      ObjectiveSource::kTheoretical, point};
}

}  // namespace dpfl
