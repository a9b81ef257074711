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

#include "dpfl/theory.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"

namespace dpfl {
namespace {

// qK/(k sigma_max^2) computed in floating point can miss an exact integer by
// an ulp or two; treat such values as the integer.
constexpr double kIntegerSnap = 1e-9;

std::optional<long> AsInteger(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= kIntegerSnap * std::max(1.0, std::abs(x))) {
    return static_cast<long>(r);
  }
  return std::nullopt;
}

}  // namespace

absl::string_view SolutionCaseName(SolutionCase c) {
  switch (c) {
    case SolutionCase::kUnconstrained:
      return "case_i_unconstrained";
    case SolutionCase::kWideSigma:
      return "case_ii_wide_sigma";
    case SolutionCase::kTightSigma:
      return "case_iii_tight_sigma";
  }
  return "unknown";
}

absl::string_view SigmaRuleName(SigmaRule rule) {
  switch (rule) {
    case SigmaRule::kFixed:
      return "fixed";
    case SigmaRule::kCurve:
      return "curve";
    case SigmaRule::kInterval:
      return "interval";
  }
  return "unknown";
}

SolutionCase ClassifyCase(double sample_ratio, int num_clients, double k,
                          std::optional<double> sigma_max, int max_rounds) {
  if (!sigma_max.has_value()) return SolutionCase::kUnconstrained;
  const double lhs = k * *sigma_max * *sigma_max * max_rounds;
  return lhs > sample_ratio * num_clients ? SolutionCase::kWideSigma
                                          : SolutionCase::kTightSigma;
}

double ManifoldResidual(const ParamPoint& point, double k, int num_clients) {
  return k * point.sigma * point.sigma * point.rounds -
         point.sample_ratio * num_clients;
}

double SolutionSegment::RepresentativeSigma(int rounds) const {
  if (rule == SigmaRule::kCurve) return std::sqrt(curve_scale / rounds);
  return sigma_hi;
}

double CurveBreakpoint(double sample_ratio, int num_clients, double k,
                       double sigma_max) {
  return sample_ratio * num_clients / (k * sigma_max * sigma_max);
}

long CurveBreakpointFloor(double sample_ratio, int num_clients, double k,
                          double sigma_max) {
  const double n = CurveBreakpoint(sample_ratio, num_clients, k, sigma_max);
  if (auto exact = AsInteger(n); exact.has_value()) return *exact;
  return static_cast<long>(std::floor(n));
}

std::vector<SolutionSegment> AnalyticalSolutions(
    double sample_ratio, int num_clients, double k,
    std::optional<double> sigma_max, int max_rounds) {
  const double scale = sample_ratio * num_clients / k;
  const SolutionCase c =
      ClassifyCase(sample_ratio, num_clients, k, sigma_max, max_rounds);
  auto segment = [&](int first, int last, SigmaRule rule, double lo,
                     double hi) {
    return SolutionSegment{first, last, rule, lo, hi, scale};
  };
  const double curve_at_end = std::sqrt(scale / max_rounds);

  if (max_rounds <= 1) {
    double hi = std::numeric_limits<double>::infinity();
    if (c == SolutionCase::kWideSigma) hi = curve_at_end;
    if (c == SolutionCase::kTightSigma) hi = *sigma_max;
    return {segment(1, 1, SigmaRule::kInterval, 0.0, hi)};
  }

  std::vector<SolutionSegment> out;
  switch (c) {
    case SolutionCase::kUnconstrained:
      out.push_back(segment(1, max_rounds, SigmaRule::kCurve, 0.0, 0.0));
      break;
    case SolutionCase::kWideSigma: {
      const double n =
          CurveBreakpoint(sample_ratio, num_clients, k, *sigma_max);
      long fixed_last;
      long curve_first;
      if (auto exact = AsInteger(n); exact.has_value()) {
        fixed_last = *exact - 1;
        curve_first = *exact;
      } else {
        fixed_last = static_cast<long>(std::floor(n));
        curve_first = static_cast<long>(std::ceil(n));
      }
      curve_first = std::max(curve_first, 1L);
      if (fixed_last >= 1) {
        out.push_back(segment(1, static_cast<int>(fixed_last),
                              SigmaRule::kFixed, *sigma_max, *sigma_max));
      }
      if (curve_first <= max_rounds - 1) {
        out.push_back(segment(static_cast<int>(curve_first), max_rounds - 1,
                              SigmaRule::kCurve, 0.0, 0.0));
      }
      out.push_back(segment(max_rounds, max_rounds, SigmaRule::kInterval, 0.0,
                            curve_at_end));
      break;
    }
    case SolutionCase::kTightSigma:
      out.push_back(segment(1, max_rounds - 1, SigmaRule::kFixed, *sigma_max,
                            *sigma_max));
      out.push_back(segment(max_rounds, max_rounds, SigmaRule::kInterval, 0.0,
                            *sigma_max));
      break;
  }
  return out;
}

double XTransform(int rounds, double sigma, double sample_ratio, double k,
                  int num_clients) {
  return 1.0 / rounds + k * sigma * sigma / (sample_ratio * num_clients);
}

double TheoreticalFront(double x, double k, int num_clients) {
  return 2.0 * std::sqrt(k) / (std::sqrt(static_cast<double>(num_clients)) * x);
}

absl::StatusOr<int> DesignMaxRounds(double efficiency_budget,
                                    double round_time) {
  if (!(round_time > 0.0)) {
    return absl::InvalidArgumentError("per-round time must be > 0");
  }
  if (!(efficiency_budget >= round_time)) {
    return absl::InvalidArgumentError(
        absl::StrCat("infeasible: efficiency budget ", efficiency_budget,
                     " is smaller than one round (", round_time, ")"));
  }
  return static_cast<int>(std::floor(efficiency_budget / round_time));
}

}  // namespace dpfl
