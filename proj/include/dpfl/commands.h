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

#ifndef DPFL_COMMANDS_H_
#define DPFL_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"

namespace dpfl {

// Each command writes its artifacts and a manifest.json under its output
// directory. On error nothing is written to the manifest and the returned
// status carries the message. Progress and results go to `log`.

struct SimulateOptions {
  std::string config_path;
  std::optional<std::string> out_dir;  // overrides the config
  std::optional<std::vector<uint64_t>> seeds;
  int jobs = 1;
};
// One (sigma, q) cell from the config's fed section: trace_seed_<s>.csv per
// seed and trace_mean.csv.
absl::Status RunSimulateCommand(const SimulateOptions& opts, std::ostream& log);

struct GridOptions {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::vector<uint64_t>> seeds;
  bool theoretical = false;
  std::optional<double> k;
  std::optional<double> sigma_max;  // drops larger sigma from the grid
  std::optional<double> round_time;
  std::optional<double> budget;
  int jobs = 1;
};
// objectives.csv over every feasible (T, sigma, q); empirical grids also
// write traces/q<q>_sigma<sigma>.csv. Failing cells go to failures.json and
// make the command fail.
absl::Status RunGridCommand(const GridOptions& opts, std::ostream& log);

struct ParetoOptions {
  std::string objectives_path;
  std::string out_dir;
};
// pareto.json from the feasible rows of an objective table.
absl::Status RunParetoCommand(const ParetoOptions& opts, std::ostream& log);

struct TheoryOptions {
  double sample_ratio = 1.0;
  int num_clients = 10;
  double k = 1.0;
  std::optional<double> sigma_max;
  double round_time = 1.0;
  double budget = 1.0;
  std::string out_dir;
};
// segments.json and curve.csv (T, sigma, sigma2_over_q, f1, f2 at the
// representative sigma of every round).
absl::Status RunTheoryCommand(const TheoryOptions& opts, std::ostream& log);

struct FitOptions {
  std::string pareto_path;
  double q0 = 1.0;
  int num_clients0 = 10;
  std::string out_dir;
};
// law.json from the members of a Pareto set.
absl::Status RunFitCommand(const FitOptions& opts, std::ostream& log);

struct DesignOptions {
  double sample_ratio = 1.0;
  int num_clients = 10;
  std::optional<double> k;
  std::optional<std::string> law_path;
  std::vector<int> rounds;
  // Complexity report inputs; the report is produced when n_sigma is set.
  std::optional<int> n_sigma;
  int n_q = 1;
  std::optional<double> t0_seconds;
  int pre_experiment_simulations = 0;
  std::string out_dir;
};
// design.json with sigma_r for every T_r, plus the complexity comparison.
absl::Status RunDesignCommand(const DesignOptions& opts, std::ostream& log);

struct ReportOptions {
  std::string pareto_path;
  std::optional<double> k;
  std::optional<std::string> law_path;
  int num_clients = 10;
  std::string out_dir;
};
// overlay.csv and pareto.svg with the experimental members and the curve
// sigma^2/q = K/(k T), and summary.json with the median relative residual
// |k sigma^2 T - qK| / (qK) over the members.
absl::Status RunReportCommand(const ReportOptions& opts, std::ostream& log);

}  // namespace dpfl

#endif  // DPFL_COMMANDS_H_
