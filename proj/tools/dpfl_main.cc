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

// Command-line front end: simulate, grid, pareto, theory, fit, design and
// report subcommands over the dpfl library.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "dpfl/commands.h"
#include "dpfl/parallel.h"

namespace {

// CLI11 leaves unset options untouched, so optional flags are bound to plain
// storage and converted afterwards.
template <typename T>
std::optional<T> IfGiven(const CLI::Option* opt, const T& value) {
  if (opt->count() == 0) return std::nullopt;
  return value;
}

int Finish(const absl::Status& status) {
  if (status.ok()) return 0;
  std::cerr << "error: " << status.message() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Differentially private federated learning simulator and "
      "Pareto analysis"};
  app.require_subcommand(1);
  int jobs = dpfl::DefaultJobs();

  // simulate
  dpfl::SimulateOptions sim;
  std::string sim_out;
  std::vector<uint64_t> sim_seeds;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Run one (sigma, q) cell over all seeds");
  simulate->add_option("--config", sim.config_path, "Experiment config JSON")
      ->required();
  CLI::Option* sim_out_opt =
      simulate->add_option("--out", sim_out, "Output directory");
  CLI::Option* sim_seed_opt = simulate->add_option(
      "--seed-list", sim_seeds, "Seeds, overriding the config");
  simulate->add_option("--jobs", jobs, "Worker threads")
      ->check(CLI::PositiveNumber);

  // grid
  dpfl::GridOptions grid;
  std::string grid_out;
  std::vector<uint64_t> grid_seeds;
  double grid_k = 0, grid_sigma_max = 0, grid_ct = 0, grid_budget = 0;
  CLI::App* grid_cmd = app.add_subcommand(
      "grid", "Evaluate objectives on the (q, sigma, T) grid");
  grid_cmd->add_option("--config", grid.config_path, "Experiment config JSON")
      ->required();
  CLI::Option* grid_out_opt =
      grid_cmd->add_option("--out", grid_out, "Output directory");
  grid_cmd->add_flag("--theoretical", grid.theoretical,
                     "Use (f1, f2) instead of simulation");
  CLI::Option* grid_k_opt = grid_cmd->add_option("--k", grid_k, "Constant k");
  CLI::Option* grid_sm_opt =
      grid_cmd->add_option("--sigma-max", grid_sigma_max, "Largest sigma");
  CLI::Option* grid_ct_opt =
      grid_cmd->add_option("--ct", grid_ct, "Per-round time c_t");
  CLI::Option* grid_budget_opt =
      grid_cmd->add_option("--budget", grid_budget, "Efficiency budget");
  CLI::Option* grid_seed_opt = grid_cmd->add_option(
      "--seed-list", grid_seeds, "Seeds, overriding the config");
  grid_cmd->add_option("--jobs", jobs, "Worker threads")
      ->check(CLI::PositiveNumber);

  // pareto
  dpfl::ParetoOptions pareto;
  CLI::App* pareto_cmd = app.add_subcommand(
      "pareto", "Non-dominated subset of an objective table");
  pareto_cmd->add_option("--in", pareto.objectives_path, "objectives.csv")
      ->required();
  pareto_cmd->add_option("--out", pareto.out_dir, "Output directory")
      ->required();

  // theory
  dpfl::TheoryOptions theory;
  double theory_sigma_max = 0;
  CLI::App* theory_cmd =
      app.add_subcommand("theory", "Analytical Pareto solutions at fixed q");
  theory_cmd->add_option("--q", theory.sample_ratio, "Sample ratio")
      ->required();
  theory_cmd->add_option("--K", theory.num_clients, "Number of clients")
      ->required();
  theory_cmd->add_option("--k", theory.k, "Constant k")->required();
  CLI::Option* theory_sm_opt =
      theory_cmd->add_option("--sigma-max", theory_sigma_max, "Largest sigma");
  theory_cmd->add_option("--ct", theory.round_time, "Per-round time c_t");
  theory_cmd->add_option("--budget", theory.budget, "Efficiency budget")
      ->required();
  theory_cmd->add_option("--out", theory.out_dir, "Output directory")
      ->required();

  // fit
  dpfl::FitOptions fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit k from a Pareto set");
  fit_cmd->add_option("--in", fit.pareto_path, "pareto.json")->required();
  fit_cmd->add_option("--q", fit.q0, "Pre-experiment sample ratio q0")
      ->required();
  fit_cmd->add_option("--K", fit.num_clients0, "Pre-experiment clients K0")
      ->required();
  fit_cmd->add_option("--out", fit.out_dir, "Output directory")->required();

  // design
  dpfl::DesignOptions design;
  double design_k = 0, design_t0 = 0;
  std::string design_law;
  int design_n_sigma = 0;
  CLI::App* design_cmd =
      app.add_subcommand("design", "Noise level for a target deployment");
  design_cmd->add_option("--q", design.sample_ratio, "Sample ratio q_r")
      ->required();
  design_cmd->add_option("--K", design.num_clients, "Number of clients")
      ->required();
  CLI::Option* design_k_opt =
      design_cmd->add_option("--k", design_k, "Constant k");
  CLI::Option* design_law_opt =
      design_cmd->add_option("--law", design_law, "law.json from fit");
  design_cmd->add_option("--T", design.rounds, "Target rounds T_r")->required();
  CLI::Option* design_ns_opt = design_cmd->add_option(
      "--n-sigma", design_n_sigma, "Baseline sigma grid size");
  design_cmd->add_option("--n-q", design.n_q, "Baseline q grid size");
  CLI::Option* design_t0_opt =
      design_cmd->add_option("--t0", design_t0, "Pre-experiment seconds");
  design_cmd->add_option("--pre-cells", design.pre_experiment_simulations,
                         "Pre-experiment simulations");
  design_cmd->add_option("--out", design.out_dir, "Output directory")
      ->required();

  // report
  dpfl::ReportOptions report;
  double report_k = 0;
  std::string report_law;
  CLI::App* report_cmd = app.add_subcommand(
      "report", "Overlay experimental Pareto solutions on the fitted law");
  report_cmd->add_option("--in", report.pareto_path, "pareto.json")->required();
  CLI::Option* report_k_opt =
      report_cmd->add_option("--k", report_k, "Constant k");
  CLI::Option* report_law_opt =
      report_cmd->add_option("--law", report_law, "law.json from fit");
  report_cmd->add_option("--K", report.num_clients, "Number of clients")
      ->required();
  report_cmd->add_option("--out", report.out_dir, "Output directory")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) {
    sim.out_dir = IfGiven(sim_out_opt, sim_out);
    sim.seeds = IfGiven(sim_seed_opt, sim_seeds);
    sim.jobs = jobs;
    return Finish(dpfl::RunSimulateCommand(sim, std::cout));
  }
  if (grid_cmd->parsed()) {
    grid.out_dir = IfGiven(grid_out_opt, grid_out);
    grid.seeds = IfGiven(grid_seed_opt, grid_seeds);
    grid.k = IfGiven(grid_k_opt, grid_k);
    grid.sigma_max = IfGiven(grid_sm_opt, grid_sigma_max);
    grid.round_time = IfGiven(grid_ct_opt, grid_ct);
    grid.budget = IfGiven(grid_budget_opt, grid_budget);
    grid.jobs = jobs;
    return Finish(dpfl::RunGridCommand(grid, std::cout));
  }
  if (pareto_cmd->parsed()) {
    return Finish(dpfl::RunParetoCommand(pareto, std::cout));
  }
  if (theory_cmd->parsed()) {
    theory.sigma_max = IfGiven(theory_sm_opt, theory_sigma_max);
    return Finish(dpfl::RunTheoryCommand(theory, std::cout));
  }
  if (fit_cmd->parsed()) {
    return Finish(dpfl::RunFitCommand(fit, std::cout));
  }
  if (design_cmd->parsed()) {
    design.k = IfGiven(design_k_opt, design_k);
    design.law_path = IfGiven(design_law_opt, design_law);
    design.n_sigma = IfGiven(design_ns_opt, design_n_sigma);
    design.t0_seconds = IfGiven(design_t0_opt, design_t0);
    return Finish(dpfl::RunDesignCommand(design, std::cout));
  }
  if (report_cmd->parsed()) {
    report.k = IfGiven(report_k_opt, report_k);
    report.law_path = IfGiven(report_law_opt, report_law);
    return Finish(dpfl::RunReportCommand(report, std::cout));
  }
  return 1;
}
