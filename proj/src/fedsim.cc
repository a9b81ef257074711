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

#include "dpfl/fedsim.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>

#include "absl/strings/str_cat.h"
#include "dpfl/parallel.h"

namespace dpfl {
namespace {

double L2Norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

absl::Status CheckData(const FedConfig& cfg, const DatasetBundle& data) {
  if (static_cast<int>(data.train_shards.size()) != cfg.num_clients) {
    return absl::InvalidArgumentError(
        absl::StrCat("dataset has ", data.train_shards.size(),
                     " shards but K=", cfg.num_clients));
  }
  for (size_t k = 0; k < data.train_shards.size(); ++k) {
    const DataShard& shard = data.train_shards[k];
    if (shard.client_id != static_cast<int>(k)) {
      return absl::InvalidArgumentError(
          absl::StrCat("shard ", k, " carries client id ", shard.client_id));
    }
    if (shard.samples.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("client ", k, " has no training data"));
    }
  }
  if (data.test_set.empty()) {
    return absl::InvalidArgumentError("empty test set");
  }
  if (data.feature_dim != cfg.arch.feature_dim ||
      data.num_classes != cfg.arch.num_classes) {
    return absl::InvalidArgumentError(
        absl::StrCat("dataset is ", data.feature_dim, "-dim with ",
                     data.num_classes, " classes, model expects ",
                     cfg.arch.feature_dim, " and ", cfg.arch.num_classes));
  }
  return absl::OkStatus();
}

}  // namespace

absl::string_view ClipModeName(ClipMode mode) {
  return mode == ClipMode::kSquaredNorm ? "squared_norm" : "norm";
}

absl::StatusOr<ClipMode> ParseClipMode(absl::string_view name) {
  if (name == "squared_norm") return ClipMode::kSquaredNorm;
  if (name == "norm") return ClipMode::kNorm;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown clip mode '", std::string(name),
                   "' (expected squared_norm or norm)"));
}

absl::Status ValidateConfig(const FedConfig& cfg) {
  if (cfg.num_clients < 1) {
    return absl::InvalidArgumentError("K must be at least 1");
  }
  if (!(cfg.sample_ratio > 0.0 && cfg.sample_ratio <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sample ratio q=", cfg.sample_ratio, " outside (0,1]"));
  }
  if (!(cfg.sigma >= 0.0) || !std::isfinite(cfg.sigma)) {
    return absl::InvalidArgumentError(
        absl::StrCat("noise level sigma=", cfg.sigma, " must be >= 0"));
  }
  if (cfg.max_rounds < 1) {
    return absl::InvalidArgumentError("T_max must be at least 1");
  }
  if (cfg.local_epochs < 0) {
    return absl::InvalidArgumentError("E must be >= 0");
  }
  if (!(cfg.learning_rate >= 0.0)) {
    return absl::InvalidArgumentError("learning rate must be >= 0");
  }
  if (!(cfg.momentum >= 0.0)) {
    return absl::InvalidArgumentError("momentum must be >= 0");
  }
  if (cfg.batch_size < 1) {
    return absl::InvalidArgumentError("batch size must be at least 1");
  }
  if (!(cfg.clip > 0.0)) {
    return absl::InvalidArgumentError("clipping constant must be > 0");
  }
  if (!cfg.arch.Valid()) {
    return absl::InvalidArgumentError("invalid model architecture");
  }
  return absl::OkStatus();
}

int ParticipantCount(int num_clients, double sample_ratio) {
  const long m = std::lround(sample_ratio * num_clients);
  return static_cast<int>(std::clamp<long>(m, 1, num_clients));
}

std::vector<int> SampleClients(int num_clients, double sample_ratio, Rng& rng) {
  std::vector<int> ids(num_clients);
  std::iota(ids.begin(), ids.end(), 0);
  const int m = ParticipantCount(num_clients, sample_ratio);
  for (int i = 0; i < m; ++i) {
    std::uniform_int_distribution<int> pick(i, num_clients - 1);
    std::swap(ids[i], ids[pick(rng)]);
  }
  ids.resize(m);
  std::sort(ids.begin(), ids.end());
  return ids;
}

absl::StatusOr<std::vector<double>> ClientUpdate(const ModelParams& global,
                                                 const DataShard& shard,
                                                 const FedConfig& cfg,
                                                 Rng& rng) {
  const size_t n = shard.samples.size();
  if (n == 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("client ", shard.client_id, " has no training data"));
  }
  const size_t batch = std::min<size_t>(cfg.batch_size, n);
  std::vector<const Sample*> pool(n);
  for (size_t i = 0; i < n; ++i) pool[i] = &shard.samples[i];

  std::vector<double> weights = global.weights;
  MomentumSgd optimizer(weights.size(), cfg.learning_rate, cfg.momentum);
  ModelParams local{global.arch, {}};
  for (int e = 0; e < cfg.local_epochs; ++e) {
    if (batch < n) {
      // Partial Fisher-Yates: the first `batch` slots become the sample.
      for (size_t i = 0; i < batch; ++i) {
        std::uniform_int_distribution<size_t> pick(i, n - 1);
        std::swap(pool[i], pool[pick(rng)]);
      }
    }
    local.weights = weights;
    auto lg = ComputeLossAndGradient(local, BatchView(pool.data(), batch));
    if (!lg.ok()) return lg.status();
    optimizer.Step(weights, lg->gradient);
  }
  for (size_t i = 0; i < weights.size(); ++i) {
    weights[i] = weights[i] - global.weights[i];
  }
  return weights;
}

std::vector<double> ClipUpdate(std::span<const double> delta, double clip,
                               ClipMode mode) {
  const double norm = L2Norm(delta);
  const double ratio =
      mode == ClipMode::kSquaredNorm ? norm * norm / clip : norm / clip;
  const double factor = std::max(1.0, ratio);
  std::vector<double> out(delta.begin(), delta.end());
  if (factor > 1.0) {
    for (double& x : out) x /= factor;
  }
  return out;
}

std::vector<double> AddNoise(std::span<const double> clipped, double sigma,
                             Rng& rng) {
  std::vector<double> out(clipped.begin(), clipped.end());
  if (sigma == 0.0) return out;
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& x : out) x += noise(rng);
  return out;
}

absl::StatusOr<ModelParams> Aggregate(const ModelParams& global,
                                      std::span<const ClientUpload> uploads) {
  if (uploads.empty()) {
    return absl::FailedPreconditionError("no client uploads to aggregate");
  }
  std::vector<const ClientUpload*> ordered;
  ordered.reserve(uploads.size());
  for (const ClientUpload& u : uploads) {
    if (u.update.size() != global.weights.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("client ", u.client_id, " uploaded ", u.update.size(),
                       " values, model has ", global.weights.size()));
    }
    ordered.push_back(&u);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const ClientUpload* a, const ClientUpload* b) {
              return a->client_id < b->client_id;
            });
  std::vector<double> sum(global.weights.size(), 0.0);
  for (const ClientUpload* u : ordered) {
    for (size_t i = 0; i < sum.size(); ++i) sum[i] += u->update[i];
  }
  const double count = static_cast<double>(ordered.size());
  ModelParams out = global;
  for (size_t i = 0; i < sum.size(); ++i) {
    out.weights[i] = out.weights[i] + sum[i] / count;
  }
  return out;
}

uint64_t DigestWeights(std::span<const double> weights) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (double w : weights) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &w, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

absl::StatusOr<RoundTrace> RunDpFedSgd(const FedConfig& cfg,
                                       const DatasetBundle& data, int jobs) {
  if (auto s = ValidateConfig(cfg); !s.ok()) return s;
  if (auto s = CheckData(cfg, data); !s.ok()) return s;

  ModelParams global = InitParams(cfg.arch, cfg.seed);
  RoundTrace trace;
  trace.test_loss.reserve(cfg.max_rounds);
  for (int t = 0; t < cfg.max_rounds; ++t) {
    const uint64_t round = static_cast<uint64_t>(t);
    Rng sampling = MakeRng(cfg.seed, round, 0, RngStream::kClientSampling);
    std::vector<int> participants =
        SampleClients(cfg.num_clients, cfg.sample_ratio, sampling);

    std::vector<ClientUpload> uploads(participants.size());
    std::vector<double> norms(participants.size(), 0.0);
    std::vector<absl::Status> status(participants.size());
    ParallelFor(participants.size(), jobs, [&](size_t i) {
      const int k = participants[i];
      Rng batch_rng = MakeRng(cfg.seed, round, k, RngStream::kBatch);
      auto delta = ClientUpdate(global, data.train_shards[k], cfg, batch_rng);
      if (!delta.ok()) {
        status[i] = delta.status();
        return;
      }
      std::vector<double> clipped = ClipUpdate(*delta, cfg.clip, cfg.clip_mode);
      norms[i] = L2Norm(clipped);
      Rng noise_rng = MakeRng(cfg.seed, round, k, RngStream::kNoise);
      uploads[i] = ClientUpload{k, AddNoise(clipped, cfg.sigma, noise_rng)};
    });
    for (const absl::Status& s : status) {
      if (!s.ok()) return s;
    }

    auto next = Aggregate(global, uploads);
    if (!next.ok()) return next.status();
    global = std::move(*next);
    auto loss = EvalTestLoss(global, data.test_set);
    if (!loss.ok()) return loss.status();

    trace.test_loss.push_back(*loss);
    trace.participants.push_back(std::move(participants));
    trace.param_digests.push_back(DigestWeights(global.weights));
    trace.max_clipped_norm.push_back(
        *std::max_element(norms.begin(), norms.end()));
  }
  return trace;
}

std::vector<double> MeanTrace(std::span<const std::vector<double>> traces) {
  if (traces.empty()) return {};
  std::vector<double> mean(traces.front().size(), 0.0);
  for (const auto& trace : traces) {
    for (size_t t = 0; t < mean.size(); ++t) mean[t] += trace[t];
  }
  for (double& v : mean) v /= static_cast<double>(traces.size());
  return mean;
}

absl::StatusOr<std::vector<double>> MultiSeedTrace(
    const FedConfig& cfg, const DatasetBundle& data,
    std::span<const uint64_t> seeds, int jobs) {
  if (seeds.empty()) return absl::InvalidArgumentError("no seeds given");
  std::vector<uint64_t> ordered(seeds.begin(), seeds.end());
  std::sort(ordered.begin(), ordered.end());

  std::vector<std::vector<double>> traces(ordered.size());
  std::vector<absl::Status> status(ordered.size());
  ParallelFor(ordered.size(), jobs, [&](size_t i) {
    FedConfig seeded = cfg;
    seeded.seed = ordered[i];
    auto trace = RunDpFedSgd(seeded, data, 1);
    if (!trace.ok()) {
      status[i] = trace.status();
      return;
    }
    traces[i] = std::move(trace->test_loss);
  });
  for (const absl::Status& s : status) {
    if (!s.ok()) return s;
  }
  return MeanTrace(traces);
}

}  // namespace dpfl
