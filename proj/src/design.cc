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

#include "dpfl/design.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace dpfl {

absl::StatusOr<FittedLaw> FitK(std::span<const ParamPoint> points, double q0,
                               int num_clients0) {
  if (!(q0 > 0.0) || num_clients0 < 1) {
    return absl::InvalidArgumentError("fit needs q0 > 0 and K0 >= 1");
  }
  FittedLaw law;
  law.q0 = q0;
  law.num_clients0 = num_clients0;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const ParamPoint& p : points) {
    if (p.rounds < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("point with T = ", p.rounds, " < 1"));
    }
    if (!(p.sigma > 0.0)) {
      ++law.excluded_points;
      continue;
    }
    xs.push_back(std::log(static_cast<double>(p.rounds)));
    if (!(p.sample_ratio > 0.0)) {
      return absl::InvalidArgumentError("point with q <= 0");
    }
    ys.push_back(std::log(p.sigma * p.sigma * q0 / p.sample_ratio));
  }
  const size_t n = xs.size();
  if (n < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("fit needs at least 2 points with sigma > 0, got ", n));
  }
  law.n_points = static_cast<int>(n);

  double x_mean = 0.0;
  double y_mean = 0.0;
  double b = 0.0;
  for (size_t i = 0; i < n; ++i) {
    x_mean += xs[i];
    y_mean += ys[i];
    b += ys[i] + xs[i];
  }
  x_mean /= n;
  y_mean /= n;
  b /= n;
  law.k = q0 * num_clients0 / std::exp(b);

  double ss_tot = 0.0;
  double ss_res = 0.0;
  double sxx = 0.0;
  double sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (b - xs[i]);
    ss_res += r * r;
    ss_tot += (ys[i] - y_mean) * (ys[i] - y_mean);
    sxx += (xs[i] - x_mean) * (xs[i] - x_mean);
    sxy += (xs[i] - x_mean) * (ys[i] - y_mean);
  }
  auto r2 = [&](double res) {
    if (ss_tot > 0.0) return 1.0 - res / ss_tot;
    return res == 0.0 ? 1.0 : 0.0;
  };
  law.fit_r2 = r2(ss_res);

  if (sxx > 0.0) {
    const double slope = sxy / sxx;
    const double intercept = y_mean - slope * x_mean;
    double free_res = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double r = ys[i] - (intercept + slope * xs[i]);
      free_res += r * r;
    }
    law.free_slope = slope;
    law.free_intercept = intercept;
    law.free_r2 = r2(free_res);
  }
  return law;
}

double DesignSigma(double sample_ratio, int num_clients, double k, int rounds) {
  return std::sqrt(sample_ratio * num_clients / (k * rounds));
}

std::vector<ParamPoint> DesignPoints(double sample_ratio, int num_clients,
                                     double k, std::span<const int> rounds) {
  std::vector<ParamPoint> out;
  out.reserve(rounds.size());
  for (int t : rounds) {
    out.push_back(
        {t, DesignSigma(sample_ratio, num_clients, k, t), sample_ratio});
  }
  return out;
}

ComplexityReport MakeComplexityReport(int n_sigma, int n_q, int rounds,
                                      std::optional<double> t0_seconds,
                                      int pre_experiment_simulations) {
  ComplexityReport r;
  r.n_sigma = n_sigma;
  r.n_q = n_q;
  r.rounds = rounds;
  r.t0_seconds = t0_seconds;
  r.pre_experiment_simulations = pre_experiment_simulations;

  r.our_design_form = "t_0 + Θ(T_r)";
  r.budget_design_form = "Θ(n_σT_r)";
  r.convergence_design_form = "Θ(n_σT_r)";
  r.our_pareto_form = "t_0 + Θ(n_σT_r)";
  r.budget_pareto_form = "Θ(n_qn_σT_r)";
  r.convergence_pareto_form = "Θ(n_qn_σT_r)";

  const long t = rounds;
  r.our_design_rounds = t;
  r.budget_design_rounds = static_cast<long>(n_sigma) * t;
  r.convergence_design_rounds = static_cast<long>(n_sigma) * t;
  r.our_pareto_rounds = static_cast<long>(n_sigma) * t;
  r.budget_pareto_rounds = static_cast<long>(n_q) * n_sigma * t;
  r.convergence_pareto_rounds = static_cast<long>(n_q) * n_sigma * t;

  r.our_simulations = 1 + pre_experiment_simulations;
  r.baseline_simulations = n_q * n_sigma;
  r.simulation_ratio = static_cast<double>(r.baseline_simulations);
  return r;
}

std::string FormatComplexityReport(const ComplexityReport& r) {
  const std::string t0 = r.t0_seconds.has_value()
                             ? absl::StrFormat("%.3fs", *r.t0_seconds)
                             : std::string("t_0");
  std::string out;
  absl::StrAppendFormat(&out, "n_sigma=%d n_q=%d T_r=%d t_0=%s\n", r.n_sigma,
                        r.n_q, r.rounds,
                        r.t0_seconds.has_value() ? t0 : "unmeasured");
  absl::StrAppend(&out, "Guiding parameter design:\n");
  absl::StrAppendFormat(
      &out, "  Our Method                  %-18s = %s + %d rounds\n",
      r.our_design_form, t0, r.our_design_rounds);
  absl::StrAppendFormat(&out,
                        "  Training with Budget        %-18s = %d rounds\n",
                        r.budget_design_form, r.budget_design_rounds);
  absl::StrAppendFormat(&out,
                        "  Training until Convergence  %-18s = %d rounds\n",
                        r.convergence_design_form, r.convergence_design_rounds);
  absl::StrAppend(&out, "Achieving Pareto set:\n");
  absl::StrAppendFormat(
      &out, "  Our Method                  %-18s = %s + %d rounds\n",
      r.our_pareto_form, t0, r.our_pareto_rounds);
  absl::StrAppendFormat(&out,
                        "  Training with Budget        %-18s = %d rounds\n",
                        r.budget_pareto_form, r.budget_pareto_rounds);
  absl::StrAppendFormat(&out,
                        "  Training until Convergence  %-18s = %d rounds\n",
                        r.convergence_pareto_form, r.convergence_pareto_rounds);
  absl::StrAppendFormat(
      &out,
      "Simulations: ours 1 deployment + %d pre-experiment = %d; baseline "
      "n_q*n_sigma = %d (%.0fx the deployment run)\n",
      r.pre_experiment_simulations, r.our_simulations, r.baseline_simulations,
      r.simulation_ratio);
  return out;
}

}  // namespace dpfl
