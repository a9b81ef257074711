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

#ifndef DPFL_FEDSIM_H_
#define DPFL_FEDSIM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dpfl/datasets.h"
#include "dpfl/models.h"
#include "dpfl/rng.h"

namespace dpfl {

// kSquaredNorm divides the update by max(1, ||d||^2 / c); kNorm by
// max(1, ||d|| / c).
enum class ClipMode { kSquaredNorm, kNorm };

absl::string_view ClipModeName(ClipMode mode);
absl::StatusOr<ClipMode> ParseClipMode(absl::string_view name);

struct FedConfig {
  int num_clients = 10;         // K
  int local_epochs = 1;         // E, one sampled batch and one step each
  double sample_ratio = 1.0;    // q
  double sigma = 0.0;           // per-coordinate noise std
  int max_rounds = 1;           // T_max
  double learning_rate = 0.01;  // eta
  double momentum = 0.0;        // reset at the start of every client update
  int batch_size = 64;          // B
  double clip = 1.0;            // c_clip
  ClipMode clip_mode = ClipMode::kSquaredNorm;
  uint64_t seed = 0;
  ModelArch arch;
};

absl::Status ValidateConfig(const FedConfig& cfg);

// max(1, round(q * K)).
int ParticipantCount(int num_clients, double sample_ratio);

// Per-round record of a DP-FedSGD run. Index t holds round t+1.
struct RoundTrace {
  std::vector<double> test_loss;
  std::vector<std::vector<int>> participants;
  std::vector<uint64_t> param_digests;
  // Largest pre-noise upload norm among the round's participants.
  std::vector<double> max_clipped_norm;
};

// Distinct client ids drawn uniformly without replacement, sorted ascending.
std::vector<int> SampleClients(int num_clients, double sample_ratio, Rng& rng);

// Runs E local steps from `global` on batches of min(B, |shard|) samples and
// returns w^{E} - w^{0}. When B covers the shard, every step uses the full
// shard in its stored order.
absl::StatusOr<std::vector<double>> ClientUpdate(const ModelParams& global,
                                                 const DataShard& shard,
                                                 const FedConfig& cfg,
                                                 Rng& rng);

std::vector<double> ClipUpdate(std::span<const double> delta, double clip,
                               ClipMode mode);

// Adds i.i.d. N(0, sigma^2) to every coordinate; sigma == 0 is the identity
// and draws nothing.
std::vector<double> AddNoise(std::span<const double> clipped, double sigma,
                             Rng& rng);

struct ClientUpload {
  int client_id = 0;
  std::vector<double> update;
};

// w + mean(updates), summed in ascending client-id order whatever order the
// uploads arrive in. FailedPrecondition on an empty round, InvalidArgument
// on a length mismatch.
absl::StatusOr<ModelParams> Aggregate(const ModelParams& global,
                                      std::span<const ClientUpload> uploads);

// FNV-1a over the raw bytes of the weights.
uint64_t DigestWeights(std::span<const double> weights);

// Full DP-FedSGD run for cfg.max_rounds rounds. Client updates within a
// round run on up to `jobs` threads; the trace does not depend on `jobs`.
absl::StatusOr<RoundTrace> RunDpFedSgd(const FedConfig& cfg,
                                       const DatasetBundle& data, int jobs = 1);

// Element-wise mean, accumulated in the given order. All traces must have
// the same length; an empty list gives an empty result.
std::vector<double> MeanTrace(std::span<const std::vector<double>> traces);

// Element-wise mean of the test-loss traces for each seed (cfg.seed is
// replaced). Seeds are summed in ascending order.
absl::StatusOr<std::vector<double>> MultiSeedTrace(
    const FedConfig& cfg, const DatasetBundle& data,
    std::span<const uint64_t> seeds, int jobs = 1);

}  // namespace dpfl

#endif  // DPFL_FEDSIM_H_
