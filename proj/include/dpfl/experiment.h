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

#ifndef DPFL_EXPERIMENT_H_
#define DPFL_EXPERIMENT_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpfl/datasets.h"
#include "dpfl/fedsim.h"
#include "dpfl/objectives.h"
#include "dpfl/pareto.h"
#include "json.hpp"

namespace dpfl {

inline constexpr char kToolName[] = "dpfl";
inline constexpr char kToolVersion[] = "0.1.0";

struct DatasetSpec {
  enum class Kind { kSynthetic, kIdx };
  Kind kind = Kind::kSynthetic;

  // kSynthetic.
  int num_classes = 2;
  int feature_dim = 20;
  int n_train = 2000;
  int n_test = 1000;
  uint64_t seed = 1;

  // kIdx.
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;
  int num_classes_idx = 10;

  // Fraction of the training set kept (the test set is always whole).
  double subset_fraction = 1.0;
  uint64_t partition_seed = 0;
};

enum class UtilityMode {
  kRaw,                 // averaged test loss at T
  kBaselineDifference,  // minus the sigma = 0 trace at the same q
};

struct ExperimentConfig {
  std::optional<DatasetSpec> dataset;  // not needed for theoretical grids
  ModelKind model = ModelKind::kLogisticRegression;
  int hidden_units = 0;
  // Simulation constants. arch is filled in from the dataset; max_rounds
  // defaults to the efficiency-budget T_max.
  FedConfig fed;
  std::vector<double> sigma_list;
  std::vector<double> q_list;
  double accountant_constant = 1.0;  // C
  double delta = 1e-5;
  std::optional<double> k;
  double round_time = 1.0;  // c_t
  double efficiency_budget = 1.0;
  std::optional<double> sigma_max;
  UtilityMode utility = UtilityMode::kRaw;
  std::vector<uint64_t> seeds = {0};
  std::string output_dir = "out";
};

// Schema (all sections optional except where noted):
//   {"dataset": {"kind": "synthetic", "num_classes", "feature_dim",
//                "n_train", "n_test", "seed", "subset_fraction",
//                "partition_seed"}
//             | {"kind": "idx", "train_images", "train_labels",
//                "test_images", "test_labels", "num_classes", ...},
//    "model": {"kind": "lr" | "mlp", "hidden_units"},
//    "fed": {"K", "E", "q", "sigma", "T_max", "eta", "momentum", "B",
//            "c_clip", "clip_mode": "squared_norm" | "norm"},
//    "grid": {"sigma_list": [...], "q_list": [...]},
//    "privacy": {"C", "delta"},
//    "theory": {"k", "c_t", "eff_budget", "sigma_max"},       (required)
//    "utility": "raw" | "baseline_difference",
//    "seeds": [...], "output_dir": "..."}
// Unknown keys are rejected so that typos do not silently fall back to
// defaults.
absl::StatusOr<ExperimentConfig> ParseExperimentConfig(const nlohmann::json& j);
absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path);
nlohmann::json ExperimentConfigJson(const ExperimentConfig& cfg);

TheoryParams MakeTheoryParams(const ExperimentConfig& cfg);
PrivacyParams MakePrivacyParams(const ExperimentConfig& cfg);

// Loads or generates the data and partitions it over cfg.fed.num_clients.
absl::StatusOr<DatasetBundle> LoadDataset(const ExperimentConfig& cfg);

// cfg.fed with the model architecture taken from the data, the given cell
// and the number of rounds.
FedConfig CellConfig(const ExperimentConfig& cfg, const DatasetBundle& data,
                     double sample_ratio, double sigma, int max_rounds);

struct EmpiricalGrid {
  GridResult grid;
  // Seed-averaged trace per (q, sigma) cell.
  std::map<std::pair<double, double>, std::vector<double>> traces;
  int simulations = 0;  // multi-seed runs, baselines included
};

// One multi-seed simulation per (q, sigma) cell, read off for every
// T <= T_max; utility from the averaged trace, privacy from the closed-form
// leakage.
absl::StatusOr<EmpiricalGrid> RunEmpiricalGrid(const ExperimentConfig& cfg,
                                               const DatasetBundle& data,
                                               int jobs);

// (f1, f2) on the same grid. FailedPrecondition when k is unset.
absl::StatusOr<GridResult> RunTheoreticalGrid(const ExperimentConfig& cfg,
                                              int jobs);

// Index of the files a command produced. The manifest itself carries no
// timings so that reruns write byte-identical manifests; wall-clock times go
// to a separate timings.json that the manifest lists.
class RunManifest {
 public:
  RunManifest(std::string command, nlohmann::json config);

  void AddFile(const std::string& relative_path, const std::string& kind,
               nlohmann::json meta = nlohmann::json::object());
  void AddTiming(const std::string& name, double seconds);

  // Writes timings.json and then manifest.json under `dir`, after checking
  // that every listed file exists.
  absl::Status Write(const std::string& dir);

 private:
  std::string command_;
  nlohmann::json config_;
  nlohmann::json files_ = nlohmann::json::array();
  nlohmann::json timings_ = nlohmann::json::object();
};

}  // namespace dpfl

#endif  // DPFL_EXPERIMENT_H_
