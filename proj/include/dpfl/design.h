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

#ifndef DPFL_DESIGN_H_
#define DPFL_DESIGN_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpfl/objectives.h"

namespace dpfl {

// k in k * sigma^2 * T = q0 * K0, estimated from Pareto solutions of a
// pre-experiment.
struct FittedLaw {
  double k = 0.0;
  // Coefficient of determination of the fixed-slope model
  // ln sigma^2 = b - ln T against the mean of ln sigma^2.
  double fit_r2 = 0.0;
  int n_points = 0;
  int excluded_points = 0;  // sigma <= 0
  double q0 = 1.0;
  int num_clients0 = 1;  // K0

  // Ordinary least squares ln sigma^2 = a + s ln T. Absent when every point
  // shares one T.
  std::optional<double> free_slope;
  std::optional<double> free_intercept;
  std::optional<double> free_r2;
};

// Fixed-slope (-1) least squares in log space:
//   b = mean(ln sigma^2 + ln T),  k = q0 K0 / exp(b).
// A point at q != q0 enters with sigma^2 scaled by q0/q, which leaves the
// law k sigma^2 T = q K0 unchanged; at q == q0 the scaling is exactly 1.
// Points with sigma <= 0 are skipped and counted. InvalidArgument when fewer
// than two usable points remain or a point has T < 1.
absl::StatusOr<FittedLaw> FitK(std::span<const ParamPoint> points, double q0,
                               int num_clients0);

// sqrt(q_r K / (k T_r)).
double DesignSigma(double sample_ratio, int num_clients, double k, int rounds);

// Deployment points (T_r, sigma_r, q_r) on the fitted law, one per T_r.
std::vector<ParamPoint> DesignPoints(double sample_ratio, int num_clients,
                                     double k, std::span<const int> rounds);

// Cost of guiding one design and of recovering a whole Pareto set, with the
// symbolic forms and their instantiation for a concrete run. Costs count
// simulated rounds; simulation counts count DP-FedSGD runs.
struct ComplexityReport {
  int n_sigma = 1;
  int n_q = 1;
  int rounds = 1;                    // T_r
  std::optional<double> t0_seconds;  // measured pre-experiment time
  int pre_experiment_simulations = 0;

  // Guiding parameter design.
  std::string our_design_form;          // t_0 + Θ(T_r)
  std::string budget_design_form;       // Θ(n_σT_r)
  std::string convergence_design_form;  // Θ(n_σT_r)
  long our_design_rounds = 0;
  long budget_design_rounds = 0;
  long convergence_design_rounds = 0;

  // Achieving the Pareto set.
  std::string our_pareto_form;          // t_0 + Θ(n_σT_r)
  std::string budget_pareto_form;       // Θ(n_qn_σT_r)
  std::string convergence_pareto_form;  // Θ(n_qn_σT_r)
  long our_pareto_rounds = 0;
  long budget_pareto_rounds = 0;
  long convergence_pareto_rounds = 0;

  // DP-FedSGD runs: one deployment run (plus the pre-experiment) against one
  // run per (q, sigma) cell.
  int our_simulations = 0;
  int baseline_simulations = 0;
  // baseline_simulations / deployment runs.
  double simulation_ratio = 0.0;
};

ComplexityReport MakeComplexityReport(int n_sigma, int n_q, int rounds,
                                      std::optional<double> t0_seconds,
                                      int pre_experiment_simulations = 0);

// Multi-line human-readable rendering of both tables.
std::string FormatComplexityReport(const ComplexityReport& report);

}  // namespace dpfl

#endif  // DPFL_DESIGN_H_
