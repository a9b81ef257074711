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

#include "dpfl/commands.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <set>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dpfl/design.h"
#include "dpfl/experiment.h"
#include "dpfl/fedsim.h"
#include "dpfl/io.h"
#include "dpfl/objectives.h"
#include "dpfl/parallel.h"
#include "dpfl/pareto.h"
#include "dpfl/status_macros.h"
#include "dpfl/svg_plot.h"
#include "dpfl/theory.h"

namespace dpfl {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class Stopwatch {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

std::string Join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

absl::Status WriteArtifact(RunManifest& manifest, const std::string& dir,
                           const std::string& name, const std::string& kind,
                           absl::string_view data, json meta = json::object()) {
  DPFL_RETURN_IF_ERROR(WriteFileAtomic(Join(dir, name), data));
  manifest.AddFile(name, kind, std::move(meta));
  return absl::OkStatus();
}

absl::StatusOr<json> ReadJsonFile(const std::string& path) {
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  json j = json::parse(*text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": invalid JSON"));
  }
  return j;
}

absl::StatusOr<std::vector<ObjectivePoint>> ReadPareto(
    const std::string& path) {
  auto j = ReadJsonFile(path);
  if (!j.ok()) return j.status();
  auto members = ParseParetoJson(*j, ObjectiveSource::kEmpirical);
  if (!members.ok()) {
    return absl::Status(members.status().code(),
                        absl::StrCat(path, ": ", members.status().message()));
  }
  return members;
}

absl::StatusOr<double> ResolveK(const std::optional<double>& k,
                                const std::optional<std::string>& law_path) {
  if (k.has_value() == law_path.has_value()) {
    return absl::InvalidArgumentError("give exactly one of --k and --law");
  }
  if (k.has_value()) {
    if (!(*k > 0.0)) return absl::InvalidArgumentError("--k must be > 0");
    return *k;
  }
  auto j = ReadJsonFile(*law_path);
  if (!j.ok()) return j.status();
  auto law = ParseFittedLawJson(*j);
  if (!law.ok()) return law.status();
  return law->k;
}

std::string CellFileName(double q, double sigma) {
  return absl::StrCat("traces/q", FormatDouble(q), "_sigma",
                      FormatDouble(sigma), ".csv");
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

absl::Status RunSimulateCommand(const SimulateOptions& opts,
                                std::ostream& log) {
  Stopwatch total;
  auto cfg = LoadExperimentConfig(opts.config_path);
  if (!cfg.ok()) return cfg.status();
  if (opts.seeds.has_value()) cfg->seeds = *opts.seeds;
  const std::string out = opts.out_dir.value_or(cfg->output_dir);

  std::vector<uint64_t> seeds = cfg->seeds;
  std::sort(seeds.begin(), seeds.end());
  if (seeds.empty()) return absl::InvalidArgumentError("no seeds given");
  if (std::adjacent_find(seeds.begin(), seeds.end()) != seeds.end()) {
    return absl::InvalidArgumentError("seed list has duplicates");
  }

  auto data = LoadDataset(*cfg);
  if (!data.ok()) return data.status();
  const FedConfig fed = CellConfig(*cfg, *data, cfg->fed.sample_ratio,
                                   cfg->fed.sigma, cfg->fed.max_rounds);
  DPFL_RETURN_IF_ERROR(ValidateConfig(fed));

  Stopwatch sim;
  std::vector<std::vector<double>> traces(seeds.size());
  std::vector<absl::Status> status(seeds.size());
  ParallelFor(seeds.size(), opts.jobs, [&](size_t i) {
    FedConfig seeded = fed;
    seeded.seed = seeds[i];
    auto trace = RunDpFedSgd(seeded, *data, 1);
    if (!trace.ok()) {
      status[i] = trace.status();
      return;
    }
    traces[i] = std::move(trace->test_loss);
  });
  for (const absl::Status& s : status) DPFL_RETURN_IF_ERROR(s);
  const double sim_seconds = sim.Seconds();

  const std::vector<double> mean = MeanTrace(traces);
  const int participants = ParticipantCount(fed.num_clients, fed.sample_ratio);
  RunManifest manifest("simulate", ExperimentConfigJson(*cfg));
  for (size_t i = 0; i < seeds.size(); ++i) {
    DPFL_RETURN_IF_ERROR(WriteArtifact(
        manifest, out, absl::StrCat("trace_seed_", seeds[i], ".csv"), "trace",
        TraceCsv(traces[i], participants), {{"seed", seeds[i]}}));
  }
  DPFL_RETURN_IF_ERROR(WriteArtifact(
      manifest, out, "trace_mean.csv", "mean_trace",
      TraceCsv(mean, participants),
      {{"seeds", seeds}, {"sigma", fed.sigma}, {"q", fed.sample_ratio}}));
  manifest.AddTiming("simulation_seconds", sim_seconds);
  manifest.AddTiming("total_seconds", total.Seconds());
  DPFL_RETURN_IF_ERROR(manifest.Write(out));

  log << absl::StrFormat(
      "simulated sigma=%g q=%g K=%d T=%d over %d seeds; final mean test loss "
      "%.6f\n",
      fed.sigma, fed.sample_ratio, fed.num_clients, fed.max_rounds,
      seeds.size(), mean.back());
  return absl::OkStatus();
}

absl::Status RunGridCommand(const GridOptions& opts, std::ostream& log) {
  Stopwatch total;
  auto cfg = LoadExperimentConfig(opts.config_path);
  if (!cfg.ok()) return cfg.status();
  if (opts.seeds.has_value()) cfg->seeds = *opts.seeds;
  if (opts.k.has_value()) cfg->k = *opts.k;
  if (opts.round_time.has_value()) cfg->round_time = *opts.round_time;
  if (opts.budget.has_value()) cfg->efficiency_budget = *opts.budget;
  if (opts.sigma_max.has_value()) {
    cfg->sigma_max = *opts.sigma_max;
  }
  if (cfg->sigma_max.has_value()) {
    std::erase_if(cfg->sigma_list,
                  [&](double s) { return s > *cfg->sigma_max; });
    if (cfg->sigma_list.empty()) {
      return absl::InvalidArgumentError("no sigma value is <= sigma_max");
    }
  }
  const TheoryParams tp = MakeTheoryParams(*cfg);
  DPFL_RETURN_IF_ERROR(ValidateTheoryParams(tp));
  const std::string out = opts.out_dir.value_or(cfg->output_dir);

  GridResult grid;
  RunManifest manifest(opts.theoretical ? "grid --theoretical" : "grid",
                       ExperimentConfigJson(*cfg));
  Stopwatch eval;
  if (opts.theoretical) {
    auto result = RunTheoreticalGrid(*cfg, opts.jobs);
    if (!result.ok()) return result.status();
    grid = *std::move(result);
  } else {
    auto data = LoadDataset(*cfg);
    if (!data.ok()) return data.status();
    auto result = RunEmpiricalGrid(*cfg, *data, opts.jobs);
    if (!result.ok()) return result.status();
    const int participants_k = cfg->fed.num_clients;
    for (const auto& [cell, trace] : result->traces) {
      DPFL_RETURN_IF_ERROR(WriteArtifact(
          manifest, out, CellFileName(cell.first, cell.second), "mean_trace",
          TraceCsv(trace, ParticipantCount(participants_k, cell.first)),
          {{"q", cell.first}, {"sigma", cell.second}}));
    }
    grid = std::move(result->grid);
  }
  manifest.AddTiming("evaluation_seconds", eval.Seconds());

  const std::vector<ObjectiveRow> rows = MakeObjectiveRows(grid.points, tp);
  DPFL_RETURN_IF_ERROR(WriteArtifact(
      manifest, out, "objectives.csv", "objectives", ObjectiveCsv(rows),
      {{"rows", rows.size()}, {"cells", grid.cells_evaluated}}));

  if (!grid.failures.empty()) {
    json failures = json::array();
    for (const CellFailure& f : grid.failures) {
      failures.push_back({{"q", f.sample_ratio},
                          {"sigma", f.sigma},
                          {"error", std::string(f.status.message())}});
    }
    DPFL_RETURN_IF_ERROR(
        WriteFileAtomic(Join(out, "failures.json"), DumpJson(failures)));
    return absl::AbortedError(absl::StrFormat(
        "%d of %d grid cells failed; see %s", grid.failures.size(),
        grid.cells_evaluated, Join(out, "failures.json")));
  }
  manifest.AddTiming("total_seconds", total.Seconds());
  DPFL_RETURN_IF_ERROR(manifest.Write(out));
  log << absl::StrFormat("%d cells, %d objective rows (T_max=%d) -> %s\n",
                         grid.cells_evaluated, rows.size(), tp.MaxRounds(),
                         Join(out, "objectives.csv"));
  return absl::OkStatus();
}

absl::Status RunParetoCommand(const ParetoOptions& opts, std::ostream& log) {
  auto text = ReadFile(opts.objectives_path);
  if (!text.ok()) return text.status();
  auto rows = ParseObjectiveCsv(*text, ObjectiveSource::kEmpirical);
  if (!rows.ok()) {
    return absl::Status(
        rows.status().code(),
        absl::StrCat(opts.objectives_path, ": ", rows.status().message()));
  }
  std::vector<ObjectivePoint> points;
  for (const ObjectiveRow& r : *rows) {
    if (r.feasible) points.push_back(r.point);
  }
  if (points.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat(opts.objectives_path, " has no feasible rows"));
  }
  SortCanonical(points);
  const ParetoSet set = NonDominatedSort(points);

  RunManifest manifest("pareto", {{"objectives", opts.objectives_path}});
  DPFL_RETURN_IF_ERROR(WriteArtifact(manifest, opts.out_dir, "pareto.json",
                                     "pareto_set",
                                     DumpJson(ParetoJson(set.members)),
                                     {{"members", set.members.size()},
                                      {"dominated", set.dominated_count},
                                      {"duplicates", set.duplicate_count}}));
  DPFL_RETURN_IF_ERROR(manifest.Write(opts.out_dir));
  log << absl::StrFormat(
      "%d points: %d Pareto members, %d dominated, %d duplicates\n",
      points.size(), set.members.size(), set.dominated_count,
      set.duplicate_count);
  return absl::OkStatus();
}

absl::Status RunTheoryCommand(const TheoryOptions& opts, std::ostream& log) {
  TheoryParams tp;
  tp.k = opts.k;
  tp.num_clients = opts.num_clients;
  tp.round_time = opts.round_time;
  tp.efficiency_budget = opts.budget;
  auto max_rounds = DesignMaxRounds(opts.budget, opts.round_time);
  if (!max_rounds.ok()) return max_rounds.status();
  DPFL_RETURN_IF_ERROR(ValidateTheoryParams(tp));
  if (!(opts.sample_ratio > 0.0 && opts.sample_ratio <= 1.0)) {
    return absl::InvalidArgumentError("--q must be in (0, 1]");
  }
  if (opts.sigma_max.has_value() && !(*opts.sigma_max > 0.0)) {
    return absl::InvalidArgumentError("--sigma-max must be > 0");
  }

  const SolutionCase c = ClassifyCase(opts.sample_ratio, opts.num_clients,
                                      opts.k, opts.sigma_max, *max_rounds);
  const std::vector<SolutionSegment> segments = AnalyticalSolutions(
      opts.sample_ratio, opts.num_clients, opts.k, opts.sigma_max, *max_rounds);

  json doc = {{"case", SolutionCaseName(c)},
              {"q", opts.sample_ratio},
              {"K", opts.num_clients},
              {"k", opts.k},
              {"T_max", *max_rounds},
              {"segments", SegmentsJson(segments, opts.sample_ratio)}};
  if (opts.sigma_max.has_value()) {
    doc["sigma_max"] = *opts.sigma_max;
    doc["breakpoint"] = CurveBreakpointFloor(
        opts.sample_ratio, opts.num_clients, opts.k, *opts.sigma_max);
  }

  std::string curve = "T,sigma,sigma2_over_q,f1,f2\n";
  for (const SolutionSegment& s : segments) {
    for (int t = s.first_round; t <= s.last_round; ++t) {
      const double sigma = s.RepresentativeSigma(t);
      absl::StrAppend(&curve, t, ",", FormatDouble(sigma), ",",
                      FormatDouble(sigma * sigma / opts.sample_ratio), ",",
                      FormatDouble(UtilityF1(t, sigma, opts.sample_ratio, tp)),
                      ",", FormatDouble(PrivacyF2(t, sigma, opts.sample_ratio)),
                      "\n");
    }
  }

  RunManifest manifest("theory", {{"q", opts.sample_ratio},
                                  {"K", opts.num_clients},
                                  {"k", opts.k},
                                  {"sigma_max", opts.sigma_max.has_value()
                                                    ? json(*opts.sigma_max)
                                                    : json(nullptr)},
                                  {"c_t", opts.round_time},
                                  {"eff_budget", opts.budget}});
  DPFL_RETURN_IF_ERROR(WriteArtifact(manifest, opts.out_dir, "segments.json",
                                     "segments", DumpJson(doc)));
  DPFL_RETURN_IF_ERROR(
      WriteArtifact(manifest, opts.out_dir, "curve.csv", "curve", curve));
  DPFL_RETURN_IF_ERROR(manifest.Write(opts.out_dir));

  log << SolutionCaseName(c) << " (T_max=" << *max_rounds << ")\n";
  for (const SolutionSegment& s : segments) {
    log << absl::StrFormat("  T in [%d, %d]: %s", s.first_round, s.last_round,
                           std::string(SigmaRuleName(s.rule)));
    switch (s.rule) {
      case SigmaRule::kFixed:
        log << absl::StrFormat(" sigma=%g\n", s.sigma_hi);
        break;
      case SigmaRule::kCurve:
        log << absl::StrFormat(" sigma=sqrt(%g/T)\n", s.curve_scale);
        break;
      case SigmaRule::kInterval:
        log << absl::StrFormat(" sigma in [%g, %g]\n", s.sigma_lo, s.sigma_hi);
        break;
    }
  }
  return absl::OkStatus();
}

absl::Status RunFitCommand(const FitOptions& opts, std::ostream& log) {
  auto members = ReadPareto(opts.pareto_path);
  if (!members.ok()) return members.status();
  std::vector<ParamPoint> origins;
  for (const ObjectivePoint& p : *members) origins.push_back(p.origin);
  auto law = FitK(origins, opts.q0, opts.num_clients0);
  if (!law.ok()) return law.status();

  RunManifest manifest("fit", {{"pareto", opts.pareto_path},
                               {"q0", opts.q0},
                               {"K0", opts.num_clients0}});
  DPFL_RETURN_IF_ERROR(WriteArtifact(manifest, opts.out_dir, "law.json",
                                     "fitted_law",
                                     DumpJson(FittedLawJson(*law))));
  DPFL_RETURN_IF_ERROR(manifest.Write(opts.out_dir));
  log << absl::StrFormat("k = %.6g (r2 = %.4f over %d points, %d excluded)\n",
                         law->k, law->fit_r2, law->n_points,
                         law->excluded_points);
  return absl::OkStatus();
}

absl::Status RunDesignCommand(const DesignOptions& opts, std::ostream& log) {
  auto k = ResolveK(opts.k, opts.law_path);
  if (!k.ok()) return k.status();
  if (opts.rounds.empty()) return absl::InvalidArgumentError("no --T given");
  if (!(opts.sample_ratio > 0.0 && opts.sample_ratio <= 1.0)) {
    return absl::InvalidArgumentError("--q must be in (0, 1]");
  }
  if (opts.num_clients < 1)
    return absl::InvalidArgumentError("--K must be >= 1");
  for (int t : opts.rounds) {
    if (t < 1) return absl::InvalidArgumentError("--T values must be >= 1");
  }

  const std::vector<ParamPoint> points =
      DesignPoints(opts.sample_ratio, opts.num_clients, *k, opts.rounds);
  json doc = {{"q", opts.sample_ratio}, {"K", opts.num_clients}, {"k", *k}};
  if (opts.law_path.has_value()) doc["law"] = *opts.law_path;
  json arr = json::array();
  for (const ParamPoint& p : points) {
    arr.push_back({{"T", p.rounds},
                   {"sigma", p.sigma},
                   {"residual", ManifoldResidual(p, *k, opts.num_clients)}});
    log << absl::StrFormat("T_r=%d  sigma_r=%.6g\n", p.rounds, p.sigma);
  }
  doc["designs"] = std::move(arr);
  if (opts.n_sigma.has_value()) {
    if (*opts.n_sigma < 1 || opts.n_q < 1) {
      return absl::InvalidArgumentError("--n-sigma and --n-q must be >= 1");
    }
    const int t_r = *std::max_element(opts.rounds.begin(), opts.rounds.end());
    const ComplexityReport report =
        MakeComplexityReport(*opts.n_sigma, opts.n_q, t_r, opts.t0_seconds,
                             opts.pre_experiment_simulations);
    doc["complexity"] = ComplexityReportJson(report);
    log << FormatComplexityReport(report);
  }

  RunManifest manifest(
      "design",
      {{"q", opts.sample_ratio}, {"K", opts.num_clients}, {"T", opts.rounds}});
  DPFL_RETURN_IF_ERROR(WriteArtifact(manifest, opts.out_dir, "design.json",
                                     "design", DumpJson(doc)));
  return manifest.Write(opts.out_dir);
}

absl::Status RunReportCommand(const ReportOptions& opts, std::ostream& log) {
  auto k = ResolveK(opts.k, opts.law_path);
  if (!k.ok()) return k.status();
  auto members = ReadPareto(opts.pareto_path);
  if (!members.ok()) return members.status();
  if (members->empty()) {
    return absl::FailedPreconditionError(
        absl::StrCat(opts.pareto_path, ": Pareto set is empty"));
  }
  const int big_k = opts.num_clients;

  std::vector<double> residuals;
  std::set<double> qs;
  int max_rounds = 1;
  std::string overlay = "series,T,sigma,q,sigma2_over_q\n";
  PlotSeries experimental{
      "experimental", PlotSeries::Style::kScatter, "#000000", {}};
  for (const ObjectivePoint& m : *members) {
    const ParamPoint& p = m.origin;
    const double qk = p.sample_ratio * big_k;
    residuals.push_back(std::abs(ManifoldResidual(p, *k, big_k)) / qk);
    qs.insert(p.sample_ratio);
    max_rounds = std::max(max_rounds, p.rounds);
    const double s2q = p.sigma * p.sigma / p.sample_ratio;
    absl::StrAppend(&overlay, "experimental,", p.rounds, ",",
                    FormatDouble(p.sigma), ",", FormatDouble(p.sample_ratio),
                    ",", FormatDouble(s2q), "\n");
    experimental.points.emplace_back(p.rounds, s2q);
  }
  PlotSeries theoretical{
      "theoretical", PlotSeries::Style::kLine, "#2ca02c", {}};
  for (double q : qs) {
    for (int t = 1; t <= max_rounds; ++t) {
      const double sigma = std::sqrt(q * big_k / (*k * t));
      absl::StrAppend(&overlay, "theoretical,", t, ",", FormatDouble(sigma),
                      ",", FormatDouble(q), ",",
                      FormatDouble(sigma * sigma / q), "\n");
    }
  }
  for (int t = 1; t <= max_rounds; ++t) {
    theoretical.points.emplace_back(t, big_k / (*k * t));
  }

  PlotSpec spec;
  spec.title =
      absl::StrFormat("Pareto solutions vs %g sigma^2 T = q %d", *k, big_k);
  spec.x_label = "T";
  spec.y_label = "sigma^2 / q";
  spec.log_x = true;
  spec.log_y = true;
  spec.series = {experimental, theoretical};

  const double median = Median(residuals);
  const double worst = *std::max_element(residuals.begin(), residuals.end());
  json summary = {{"k", *k},
                  {"K", big_k},
                  {"members", members->size()},
                  {"median_relative_residual", median},
                  {"max_relative_residual", worst}};

  RunManifest manifest("report",
                       {{"pareto", opts.pareto_path}, {"k", *k}, {"K", big_k}});
  DPFL_RETURN_IF_ERROR(
      WriteArtifact(manifest, opts.out_dir, "overlay.csv", "overlay", overlay));
  DPFL_RETURN_IF_ERROR(WriteArtifact(manifest, opts.out_dir, "pareto.svg",
                                     "plot", RenderSvg(spec)));
  DPFL_RETURN_IF_ERROR(WriteArtifact(manifest, opts.out_dir, "summary.json",
                                     "summary", DumpJson(summary)));
  DPFL_RETURN_IF_ERROR(manifest.Write(opts.out_dir));
  log << absl::StrFormat(
      "median |k sigma^2 T - qK| / (qK) = %.4f over %d members (max %.4f)\n",
      median, members->size(), worst);
  return absl::OkStatus();
}

}  // namespace dpfl
