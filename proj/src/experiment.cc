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

#include "dpfl/experiment.h"

#include <algorithm>
#include <filesystem>
#include <mutex>
#include <set>

#include "absl/strings/str_cat.h"
#include "dpfl/io.h"
#include "dpfl/parallel.h"
#include "dpfl/status_macros.h"

namespace dpfl {
namespace {

using nlohmann::json;

absl::Status CheckKeys(const json& obj, absl::string_view where,
                       std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) {
    return absl::InvalidArgumentError(
        absl::StrCat("\"", where, "\" must be an object"));
  }
  for (const auto& [key, value] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return key == a;
        }) == allowed.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown key \"", key, "\" in ", where));
    }
  }
  return absl::OkStatus();
}

// Reads obj[key] into *out when present. Type errors become InvalidArgument.
template <typename T>
absl::Status Read(const json& obj, const char* key, T* out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return absl::OkStatus();
  try {
    *out = it->get<T>();
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad value for \"", key, "\": ", e.what()));
  }
  return absl::OkStatus();
}

template <typename T>
absl::Status ReadOptional(const json& obj, const char* key,
                          std::optional<T>* out) {
  if (!obj.contains(key) || obj[key].is_null()) return absl::OkStatus();
  T v{};
  if (absl::Status s = Read(obj, key, &v); !s.ok()) return s;
  *out = v;
  return absl::OkStatus();
}

absl::StatusOr<DatasetSpec> ParseDataset(const json& j) {
  DatasetSpec d;
  std::string kind = "synthetic";
  DPFL_RETURN_IF_ERROR(Read(j, "kind", &kind));
  if (kind == "synthetic") {
    DPFL_RETURN_IF_ERROR(
        CheckKeys(j, "dataset",
                  {"kind", "num_classes", "feature_dim", "n_train", "n_test",
                   "seed", "subset_fraction", "partition_seed"}));
    d.kind = DatasetSpec::Kind::kSynthetic;
    DPFL_RETURN_IF_ERROR(Read(j, "num_classes", &d.num_classes));
    DPFL_RETURN_IF_ERROR(Read(j, "feature_dim", &d.feature_dim));
    DPFL_RETURN_IF_ERROR(Read(j, "n_train", &d.n_train));
    DPFL_RETURN_IF_ERROR(Read(j, "n_test", &d.n_test));
    DPFL_RETURN_IF_ERROR(Read(j, "seed", &d.seed));
  } else if (kind == "idx" || kind == "mnist") {
    DPFL_RETURN_IF_ERROR(CheckKeys(
        j, "dataset",
        {"kind", "train_images", "train_labels", "test_images", "test_labels",
         "num_classes", "subset_fraction", "partition_seed"}));
    d.kind = DatasetSpec::Kind::kIdx;
    for (auto [key, dst] : {std::pair{"train_images", &d.train_images},
                            {"train_labels", &d.train_labels},
                            {"test_images", &d.test_images},
                            {"test_labels", &d.test_labels}}) {
      if (!j.contains(key)) {
        return absl::InvalidArgumentError(
            absl::StrCat("dataset of kind \"", kind, "\" needs \"", key, "\""));
      }
      DPFL_RETURN_IF_ERROR(Read(j, key, dst));
    }
    DPFL_RETURN_IF_ERROR(Read(j, "num_classes", &d.num_classes_idx));
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown dataset kind \"", kind, "\""));
  }
  DPFL_RETURN_IF_ERROR(Read(j, "subset_fraction", &d.subset_fraction));
  DPFL_RETURN_IF_ERROR(Read(j, "partition_seed", &d.partition_seed));
  if (!(d.subset_fraction > 0.0 && d.subset_fraction <= 1.0)) {
    return absl::InvalidArgumentError("subset_fraction must be in (0, 1]");
  }
  return d;
}

}  // namespace

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(const json& j) {
  DPFL_RETURN_IF_ERROR(CheckKeys(j, "config",
                                 {"dataset", "model", "fed", "grid", "privacy",
                                  "theory", "utility", "seeds", "output_dir"}));
  ExperimentConfig cfg;

  if (j.contains("dataset")) {
    auto d = ParseDataset(j["dataset"]);
    if (!d.ok()) return d.status();
    cfg.dataset = *d;
  }

  if (j.contains("model")) {
    const json& m = j["model"];
    DPFL_RETURN_IF_ERROR(CheckKeys(m, "model", {"kind", "hidden_units"}));
    std::string kind = "lr";
    DPFL_RETURN_IF_ERROR(Read(m, "kind", &kind));
    if (kind == "lr") {
      cfg.model = ModelKind::kLogisticRegression;
    } else if (kind == "mlp") {
      cfg.model = ModelKind::kMlp;
      cfg.hidden_units = 32;
      DPFL_RETURN_IF_ERROR(Read(m, "hidden_units", &cfg.hidden_units));
      if (cfg.hidden_units < 1) {
        return absl::InvalidArgumentError("hidden_units must be >= 1");
      }
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown model kind \"", kind, "\""));
    }
  }

  std::optional<int> fed_max_rounds;
  if (j.contains("fed")) {
    const json& f = j["fed"];
    DPFL_RETURN_IF_ERROR(CheckKeys(f, "fed",
                                   {"K", "E", "q", "sigma", "T_max", "eta",
                                    "momentum", "B", "c_clip", "clip_mode"}));
    FedConfig& fed = cfg.fed;
    DPFL_RETURN_IF_ERROR(Read(f, "K", &fed.num_clients));
    DPFL_RETURN_IF_ERROR(Read(f, "E", &fed.local_epochs));
    DPFL_RETURN_IF_ERROR(Read(f, "q", &fed.sample_ratio));
    DPFL_RETURN_IF_ERROR(Read(f, "sigma", &fed.sigma));
    DPFL_RETURN_IF_ERROR(ReadOptional(f, "T_max", &fed_max_rounds));
    DPFL_RETURN_IF_ERROR(Read(f, "eta", &fed.learning_rate));
    DPFL_RETURN_IF_ERROR(Read(f, "momentum", &fed.momentum));
    DPFL_RETURN_IF_ERROR(Read(f, "B", &fed.batch_size));
    DPFL_RETURN_IF_ERROR(Read(f, "c_clip", &fed.clip));
    std::string mode = std::string(ClipModeName(fed.clip_mode));
    DPFL_RETURN_IF_ERROR(Read(f, "clip_mode", &mode));
    auto parsed = ParseClipMode(mode);
    if (!parsed.ok()) return parsed.status();
    fed.clip_mode = *parsed;
  }

  if (j.contains("grid")) {
    const json& g = j["grid"];
    DPFL_RETURN_IF_ERROR(CheckKeys(g, "grid", {"sigma_list", "q_list"}));
    DPFL_RETURN_IF_ERROR(Read(g, "sigma_list", &cfg.sigma_list));
    DPFL_RETURN_IF_ERROR(Read(g, "q_list", &cfg.q_list));
  }
  if (cfg.sigma_list.empty()) cfg.sigma_list = {cfg.fed.sigma};
  if (cfg.q_list.empty()) cfg.q_list = {cfg.fed.sample_ratio};
  for (double s : cfg.sigma_list) {
    if (!(s >= 0.0))
      return absl::InvalidArgumentError("sigma values must be >= 0");
  }
  for (double q : cfg.q_list) {
    if (!(q > 0.0 && q <= 1.0)) {
      return absl::InvalidArgumentError("q values must be in (0, 1]");
    }
  }

  if (j.contains("privacy")) {
    const json& p = j["privacy"];
    DPFL_RETURN_IF_ERROR(CheckKeys(p, "privacy", {"C", "delta"}));
    DPFL_RETURN_IF_ERROR(Read(p, "C", &cfg.accountant_constant));
    DPFL_RETURN_IF_ERROR(Read(p, "delta", &cfg.delta));
  }

  if (!j.contains("theory")) {
    return absl::InvalidArgumentError(
        "config needs a \"theory\" section with c_t and eff_budget");
  }
  const json& t = j["theory"];
  DPFL_RETURN_IF_ERROR(
      CheckKeys(t, "theory", {"k", "c_t", "eff_budget", "sigma_max"}));
  DPFL_RETURN_IF_ERROR(ReadOptional(t, "k", &cfg.k));
  DPFL_RETURN_IF_ERROR(Read(t, "c_t", &cfg.round_time));
  if (!t.contains("eff_budget")) {
    return absl::InvalidArgumentError("theory.eff_budget is required");
  }
  DPFL_RETURN_IF_ERROR(Read(t, "eff_budget", &cfg.efficiency_budget));
  DPFL_RETURN_IF_ERROR(ReadOptional(t, "sigma_max", &cfg.sigma_max));

  std::string utility = "raw";
  DPFL_RETURN_IF_ERROR(Read(j, "utility", &utility));
  if (utility == "raw") {
    cfg.utility = UtilityMode::kRaw;
  } else if (utility == "baseline_difference") {
    cfg.utility = UtilityMode::kBaselineDifference;
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown utility mode \"", utility, "\""));
  }
  DPFL_RETURN_IF_ERROR(Read(j, "seeds", &cfg.seeds));
  if (cfg.seeds.empty()) return absl::InvalidArgumentError("seeds is empty");
  DPFL_RETURN_IF_ERROR(Read(j, "output_dir", &cfg.output_dir));

  const TheoryParams tp = MakeTheoryParams(cfg);
  if (absl::Status s = ValidateTheoryParams(tp); !s.ok()) return s;
  cfg.fed.max_rounds = fed_max_rounds.value_or(tp.MaxRounds());
  if (cfg.fed.max_rounds < 1) {
    return absl::InvalidArgumentError("T_max must be >= 1");
  }
  if (cfg.k.has_value() && !(*cfg.k > 0.0)) {
    return absl::InvalidArgumentError("theory.k must be > 0");
  }
  return cfg;
}

absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path) {
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  json j = json::parse(*text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": invalid JSON"));
  }
  auto cfg = ParseExperimentConfig(j);
  if (!cfg.ok()) {
    return absl::Status(cfg.status().code(),
                        absl::StrCat(path, ": ", cfg.status().message()));
  }
  return cfg;
}

json ExperimentConfigJson(const ExperimentConfig& cfg) {
  json j;
  if (cfg.dataset.has_value()) {
    const DatasetSpec& d = *cfg.dataset;
    if (d.kind == DatasetSpec::Kind::kSynthetic) {
      j["dataset"] = {
          {"kind", "synthetic"},          {"num_classes", d.num_classes},
          {"feature_dim", d.feature_dim}, {"n_train", d.n_train},
          {"n_test", d.n_test},           {"seed", d.seed}};
    } else {
      j["dataset"] = {{"kind", "idx"},
                      {"train_images", d.train_images},
                      {"train_labels", d.train_labels},
                      {"test_images", d.test_images},
                      {"test_labels", d.test_labels},
                      {"num_classes", d.num_classes_idx}};
    }
    j["dataset"]["subset_fraction"] = d.subset_fraction;
    j["dataset"]["partition_seed"] = d.partition_seed;
  }
  j["model"] = {{"kind", cfg.model == ModelKind::kMlp ? "mlp" : "lr"}};
  if (cfg.model == ModelKind::kMlp)
    j["model"]["hidden_units"] = cfg.hidden_units;
  const FedConfig& f = cfg.fed;
  j["fed"] = {
      {"K", f.num_clients},     {"E", f.local_epochs},
      {"q", f.sample_ratio},    {"sigma", f.sigma},
      {"T_max", f.max_rounds},  {"eta", f.learning_rate},
      {"momentum", f.momentum}, {"B", f.batch_size},
      {"c_clip", f.clip},       {"clip_mode", ClipModeName(f.clip_mode)}};
  j["grid"] = {{"sigma_list", cfg.sigma_list}, {"q_list", cfg.q_list}};
  j["privacy"] = {{"C", cfg.accountant_constant}, {"delta", cfg.delta}};
  j["theory"] = {{"c_t", cfg.round_time},
                 {"eff_budget", cfg.efficiency_budget}};
  if (cfg.k.has_value()) j["theory"]["k"] = *cfg.k;
  if (cfg.sigma_max.has_value()) j["theory"]["sigma_max"] = *cfg.sigma_max;
  j["utility"] =
      cfg.utility == UtilityMode::kRaw ? "raw" : "baseline_difference";
  j["seeds"] = cfg.seeds;
  j["output_dir"] = cfg.output_dir;
  return j;
}

TheoryParams MakeTheoryParams(const ExperimentConfig& cfg) {
  TheoryParams tp;
  tp.k = cfg.k.value_or(1.0);
  tp.num_clients = cfg.fed.num_clients;
  tp.round_time = cfg.round_time;
  tp.efficiency_budget = cfg.efficiency_budget;
  return tp;
}

PrivacyParams MakePrivacyParams(const ExperimentConfig& cfg) {
  PrivacyParams p;
  p.accountant_constant = cfg.accountant_constant;
  p.clip = cfg.fed.clip;
  p.delta = cfg.delta;
  p.num_clients = cfg.fed.num_clients;
  return p;
}

absl::StatusOr<DatasetBundle> LoadDataset(const ExperimentConfig& cfg) {
  if (!cfg.dataset.has_value()) {
    return absl::InvalidArgumentError("config has no dataset section");
  }
  const DatasetSpec& d = *cfg.dataset;
  const int num_clients = cfg.fed.num_clients;
  DatasetBundle bundle;
  if (d.kind == DatasetSpec::Kind::kSynthetic) {
    auto synth =
        SynthDataset(d.num_classes, d.feature_dim, d.n_train, d.n_test, d.seed);
    if (!synth.ok()) return synth.status();
    bundle = *std::move(synth);
  } else {
    auto train = LoadIdxSamples(d.train_images, d.train_labels);
    if (!train.ok()) return train.status();
    auto test = LoadIdxSamples(d.test_images, d.test_labels);
    if (!test.ok()) return test.status();
    if (train->empty() || test->empty()) {
      return absl::InvalidArgumentError("IDX train or test set is empty");
    }
    bundle.num_classes = d.num_classes_idx;
    bundle.feature_dim = static_cast<int>(train->front().features.size());
    for (const auto* set : {&*train, &*test}) {
      for (const Sample& s : *set) {
        if (s.label >= bundle.num_classes) {
          return absl::InvalidArgumentError(absl::StrCat(
              "label ", s.label, " exceeds num_classes ", bundle.num_classes));
        }
        if (static_cast<int>(s.features.size()) != bundle.feature_dim) {
          return absl::InvalidArgumentError(
              "train and test image sizes differ");
        }
      }
    }
    bundle.train_shards = {DataShard{0, *std::move(train)}};
    bundle.test_set = *std::move(test);
  }
  if (d.subset_fraction < 1.0) {
    return SubsampleTrain(bundle, d.subset_fraction, num_clients,
                          d.partition_seed);
  }
  return Repartition(bundle, num_clients, d.partition_seed);
}

FedConfig CellConfig(const ExperimentConfig& cfg, const DatasetBundle& data,
                     double sample_ratio, double sigma, int max_rounds) {
  FedConfig fed = cfg.fed;
  fed.sample_ratio = sample_ratio;
  fed.sigma = sigma;
  fed.max_rounds = max_rounds;
  fed.arch =
      cfg.model == ModelKind::kMlp
          ? ModelArch::Mlp(data.feature_dim, cfg.hidden_units, data.num_classes)
          : ModelArch::LogisticRegression(data.feature_dim, data.num_classes);
  return fed;
}

absl::StatusOr<EmpiricalGrid> RunEmpiricalGrid(const ExperimentConfig& cfg,
                                               const DatasetBundle& data,
                                               int jobs) {
  const TheoryParams tp = MakeTheoryParams(cfg);
  const PrivacyParams pp = MakePrivacyParams(cfg);
  if (absl::Status s = ValidatePrivacyParams(pp); !s.ok()) return s;
  const int max_rounds = tp.MaxRounds();

  EmpiricalGrid out;
  std::map<double, std::vector<double>> baselines;
  if (cfg.utility == UtilityMode::kBaselineDifference) {
    for (double q : std::set<double>(cfg.q_list.begin(), cfg.q_list.end())) {
      auto base = MultiSeedTrace(CellConfig(cfg, data, q, 0.0, max_rounds),
                                 data, cfg.seeds, jobs);
      if (!base.ok()) return base.status();
      baselines[q] = *std::move(base);
      ++out.simulations;
    }
  }

  std::mutex mu;
  const CellEvaluator evaluator =
      [&](double q, double sigma,
          int rounds) -> absl::StatusOr<std::vector<ObjectivePoint>> {
    auto trace = MultiSeedTrace(CellConfig(cfg, data, q, sigma, rounds), data,
                                cfg.seeds, /*jobs=*/1);
    if (!trace.ok()) return trace.status();
    std::optional<std::span<const double>> baseline;
    if (cfg.utility == UtilityMode::kBaselineDifference) {
      baseline = std::span<const double>(baselines.at(q));
    }
    std::vector<ObjectivePoint> points;
    points.reserve(rounds);
    for (int t = 1; t <= rounds; ++t) {
      auto utility = EmpiricalUtility(*trace, t, baseline);
      if (!utility.ok()) return utility.status();
      points.push_back({*utility, PrivacyLeakage(t, sigma, q, pp),
                        ObjectiveSource::kEmpirical, ParamPoint{t, sigma, q}});
    }
    std::lock_guard<std::mutex> lock(mu);
    out.traces[{q, sigma}] = *std::move(trace);
    return points;
  };
  auto grid = GridSearch(cfg.q_list, cfg.sigma_list, tp, evaluator, jobs);
  if (!grid.ok()) return grid.status();
  out.grid = *std::move(grid);
  out.simulations += out.grid.cells_evaluated;
  return out;
}

absl::StatusOr<GridResult> RunTheoreticalGrid(const ExperimentConfig& cfg,
                                              int jobs) {
  if (!cfg.k.has_value()) {
    return absl::FailedPreconditionError(
        "theoretical objectives need theory.k (or --k)");
  }
  const TheoryParams tp = MakeTheoryParams(cfg);
  return GridSearch(
      cfg.q_list, cfg.sigma_list, tp,
      EvaluatePointwise(
          [tp](const ParamPoint& p) -> absl::StatusOr<ObjectivePoint> {
            return TheoreticalObjective(p, tp);
          }),
      jobs);
}

RunManifest::RunManifest(std::string command, json config)
    : command_(std::move(command)), config_(std::move(config)) {}

void RunManifest::AddFile(const std::string& relative_path,
                          const std::string& kind, json meta) {
  json entry = {{"path", relative_path}, {"kind", kind}};
  if (!meta.empty()) entry["meta"] = std::move(meta);
  files_.push_back(std::move(entry));
}

void RunManifest::AddTiming(const std::string& name, double seconds) {
  timings_[name] = seconds;
}

absl::Status RunManifest::Write(const std::string& dir) {
  namespace fs = std::filesystem;
  for (const json& f : files_) {
    const fs::path p = fs::path(dir) / f["path"].get<std::string>();
    if (!fs::exists(p)) {
      return absl::InternalError(
          absl::StrCat("manifest lists missing file ", p.string()));
    }
  }
  if (absl::Status s = WriteFileAtomic(
          (fs::path(dir) / "timings.json").string(), DumpJson(timings_));
      !s.ok()) {
    return s;
  }
  json files = files_;
  files.push_back({{"path", "timings.json"}, {"kind", "timings"}});
  const json manifest = {{"tool", kToolName},
                         {"version", kToolVersion},
                         {"command", command_},
                         {"config", config_},
                         {"files", files}};
  return WriteFileAtomic((fs::path(dir) / "manifest.json").string(),
                         DumpJson(manifest));
}

}  // namespace dpfl
