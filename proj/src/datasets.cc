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

#include "dpfl/datasets.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "dpfl/rng.h"

namespace dpfl {
namespace {

absl::StatusOr<std::vector<uint8_t>> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

uint32_t ReadBigEndian32(const std::vector<uint8_t>& bytes, size_t offset) {
  return (uint32_t{bytes[offset]} << 24) | (uint32_t{bytes[offset + 1]} << 16) |
         (uint32_t{bytes[offset + 2]} << 8) | uint32_t{bytes[offset + 3]};
}

void AppendBigEndian32(std::string& out, uint32_t v) {
  out.push_back(static_cast<char>((v >> 24) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>(v & 0xff));
}

absl::Status CheckHeader(const std::vector<uint8_t>& bytes, uint32_t magic,
                         size_t header_size, const std::string& path) {
  if (bytes.size() < 4) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": not an IDX file (missing magic)"));
  }
  uint32_t found = ReadBigEndian32(bytes, 0);
  if (found != magic) {
    return absl::InvalidArgumentError(absl::StrCat(
        path, ": bad IDX magic 0x", absl::Hex(found, absl::kZeroPad8),
        ", expected 0x", absl::Hex(magic, absl::kZeroPad8)));
  }
  if (bytes.size() < header_size) {
    return absl::DataLossError(absl::StrCat(path, ": truncated IDX header"));
  }
  return absl::OkStatus();
}

absl::Status WriteFile(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) return absl::DataLossError(absl::StrCat("short write to ", path));
  return absl::OkStatus();
}

}  // namespace

std::vector<Sample> DatasetBundle::TrainSamples() const {
  std::vector<Sample> all;
  all.reserve(TrainSize());
  for (const DataShard& shard : train_shards) {
    all.insert(all.end(), shard.samples.begin(), shard.samples.end());
  }
  return all;
}

size_t DatasetBundle::TrainSize() const {
  size_t n = 0;
  for (const DataShard& shard : train_shards) n += shard.samples.size();
  return n;
}

absl::StatusOr<std::vector<std::vector<double>>> LoadIdxImages(
    const std::string& path) {
  auto bytes = ReadFileBytes(path);
  if (!bytes.ok()) return bytes.status();
  if (auto s = CheckHeader(*bytes, kIdxImagesMagic, 16, path); !s.ok()) {
    return s;
  }
  const uint64_t count = ReadBigEndian32(*bytes, 4);
  const uint64_t rows = ReadBigEndian32(*bytes, 8);
  const uint64_t cols = ReadBigEndian32(*bytes, 12);
  const uint64_t pixels = rows * cols;
  if (bytes->size() - 16 < count * pixels) {
    return absl::DataLossError(
        absl::StrCat(path, ": payload has ", bytes->size() - 16,
                     " bytes, header promises ", count * pixels));
  }
  std::vector<std::vector<double>> images(count, std::vector<double>(pixels));
  const uint8_t* p = bytes->data() + 16;
  for (auto& image : images) {
    for (double& v : image) v = static_cast<double>(*p++) / 255.0;
  }
  return images;
}

absl::StatusOr<std::vector<int>> LoadIdxLabels(const std::string& path) {
  auto bytes = ReadFileBytes(path);
  if (!bytes.ok()) return bytes.status();
  if (auto s = CheckHeader(*bytes, kIdxLabelsMagic, 8, path); !s.ok()) {
    return s;
  }
  const uint64_t count = ReadBigEndian32(*bytes, 4);
  if (bytes->size() - 8 < count) {
    return absl::DataLossError(
        absl::StrCat(path, ": payload has ", bytes->size() - 8,
                     " labels, header promises ", count));
  }
  return std::vector<int>(bytes->begin() + 8, bytes->begin() + 8 + count);
}

absl::Status WriteIdxImages(const std::string& path,
                            const std::vector<std::vector<double>>& images,
                            int rows, int cols) {
  if (rows <= 0 || cols <= 0) {
    return absl::InvalidArgumentError("image dimensions must be positive");
  }
  const size_t pixels = static_cast<size_t>(rows) * static_cast<size_t>(cols);
  std::string out;
  out.reserve(16 + images.size() * pixels);
  AppendBigEndian32(out, kIdxImagesMagic);
  AppendBigEndian32(out, static_cast<uint32_t>(images.size()));
  AppendBigEndian32(out, static_cast<uint32_t>(rows));
  AppendBigEndian32(out, static_cast<uint32_t>(cols));
  for (const auto& image : images) {
    if (image.size() != pixels) {
      return absl::InvalidArgumentError(absl::StrCat(
          "image has ", image.size(), " values, expected ", pixels));
    }
    for (double v : image) {
      double clamped = std::clamp(v, 0.0, 1.0);
      out.push_back(static_cast<char>(
          static_cast<uint8_t>(std::lround(clamped * 255.0))));
    }
  }
  return WriteFile(path, out);
}

absl::Status WriteIdxLabels(const std::string& path,
                            std::span<const int> labels) {
  std::string out;
  out.reserve(8 + labels.size());
  AppendBigEndian32(out, kIdxLabelsMagic);
  AppendBigEndian32(out, static_cast<uint32_t>(labels.size()));
  for (int label : labels) {
    if (label < 0 || label > 255) {
      return absl::InvalidArgumentError(
          absl::StrCat("label ", label, " does not fit in one byte"));
    }
    out.push_back(static_cast<char>(static_cast<uint8_t>(label)));
  }
  return WriteFile(path, out);
}

absl::StatusOr<std::vector<Sample>> LoadIdxSamples(
    const std::string& images_path, const std::string& labels_path) {
  auto images = LoadIdxImages(images_path);
  if (!images.ok()) return images.status();
  auto labels = LoadIdxLabels(labels_path);
  if (!labels.ok()) return labels.status();
  if (images->size() != labels->size()) {
    return absl::InvalidArgumentError(
        absl::StrCat(images_path, " has ", images->size(), " images but ",
                     labels_path, " has ", labels->size(), " labels"));
  }
  std::vector<Sample> samples(images->size());
  for (size_t i = 0; i < samples.size(); ++i) {
    samples[i].features = std::move((*images)[i]);
    samples[i].label = (*labels)[i];
  }
  return samples;
}

absl::StatusOr<DatasetBundle> SynthDataset(int num_classes, int feature_dim,
                                           int n_train, int n_test,
                                           uint64_t seed) {
  if (num_classes < 2) {
    return absl::InvalidArgumentError("synthetic data needs >= 2 classes");
  }
  if (feature_dim <= 0 || n_train <= 0 || n_test <= 0) {
    return absl::InvalidArgumentError(
        "synthetic feature_dim, n_train and n_test must be positive");
  }
  auto draw = [&](int n, RngStream stream) {
    Rng rng = MakeRng(seed, 0, 0, stream);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<Sample> out(n);
    for (int i = 0; i < n; ++i) {
      const int label = i % num_classes;
      const int axis = label % feature_dim;
      const double sign = (label / feature_dim) % 2 == 0 ? 1.0 : -1.0;
      out[i].label = label;
      out[i].features.resize(feature_dim);
      for (int j = 0; j < feature_dim; ++j) {
        const double mean = j == axis ? sign * kSynthClassSeparation : 0.0;
        out[i].features[j] = mean + noise(rng);
      }
    }
    return out;
  };
  DatasetBundle bundle;
  bundle.num_classes = num_classes;
  bundle.feature_dim = feature_dim;
  bundle.train_shards.push_back(
      DataShard{0, draw(n_train, RngStream::kSynthTrain)});
  bundle.test_set = draw(n_test, RngStream::kSynthTest);
  return bundle;
}

absl::StatusOr<std::vector<DataShard>> PartitionIid(
    std::span<const Sample> samples, int num_clients, uint64_t seed) {
  if (num_clients < 1) {
    return absl::InvalidArgumentError("need at least one client");
  }
  if (samples.empty()) {
    return absl::InvalidArgumentError("cannot partition an empty dataset");
  }
  if (static_cast<size_t>(num_clients) > samples.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("K=", num_clients, " exceeds the ", samples.size(),
                     " available samples"));
  }
  std::vector<size_t> order(samples.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng = MakeRng(seed, 0, 0, RngStream::kPartition);
  std::shuffle(order.begin(), order.end(), rng);

  const size_t base = samples.size() / num_clients;
  const size_t extra = samples.size() % num_clients;
  std::vector<DataShard> shards(num_clients);
  size_t next = 0;
  for (int k = 0; k < num_clients; ++k) {
    const size_t size = base + (static_cast<size_t>(k) < extra ? 1 : 0);
    shards[k].client_id = k;
    shards[k].samples.reserve(size);
    for (size_t i = 0; i < size; ++i) {
      shards[k].samples.push_back(samples[order[next++]]);
    }
  }
  return shards;
}

absl::StatusOr<DatasetBundle> Repartition(const DatasetBundle& bundle,
                                          int num_clients, uint64_t seed) {
  std::vector<Sample> all = bundle.TrainSamples();
  auto shards = PartitionIid(all, num_clients, seed);
  if (!shards.ok()) return shards.status();
  DatasetBundle out;
  out.train_shards = std::move(*shards);
  out.test_set = bundle.test_set;
  out.num_classes = bundle.num_classes;
  out.feature_dim = bundle.feature_dim;
  return out;
}

absl::StatusOr<DatasetBundle> SubsampleTrain(const DatasetBundle& bundle,
                                             double fraction, int num_clients,
                                             uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("subset fraction ", fraction, " outside (0,1]"));
  }
  std::vector<Sample> all = bundle.TrainSamples();
  size_t keep = static_cast<size_t>(std::llround(fraction * all.size()));
  keep = std::clamp<size_t>(keep, std::max<size_t>(1, num_clients), all.size());
  std::vector<size_t> order(all.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng = MakeRng(seed, 0, 0, RngStream::kSubsample);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(keep);
  std::sort(order.begin(), order.end());
  std::vector<Sample> kept;
  kept.reserve(keep);
  for (size_t i : order) kept.push_back(std::move(all[i]));

  auto shards = PartitionIid(kept, num_clients, seed);
  if (!shards.ok()) return shards.status();
  DatasetBundle out;
  out.train_shards = std::move(*shards);
  out.test_set = bundle.test_set;
  out.num_classes = bundle.num_classes;
  out.feature_dim = bundle.feature_dim;
  return out;
}

absl::Status ExportIdx(const DatasetBundle& bundle, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create ", dir, ": ", ec.message()));
  }
  const std::vector<Sample> train = bundle.TrainSamples();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto* set : {&train, &bundle.test_set}) {
    for (const Sample& s : *set) {
      for (double v : s.features) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  const double span = hi > lo ? hi - lo : 1.0;
  auto write = [&](const std::vector<Sample>& set,
                   const std::string& stem) -> absl::Status {
    std::vector<std::vector<double>> images;
    std::vector<int> labels;
    images.reserve(set.size());
    for (const Sample& s : set) {
      std::vector<double> row(s.features.size());
      for (size_t j = 0; j < row.size(); ++j) {
        row[j] = (s.features[j] - lo) / span;
      }
      images.push_back(std::move(row));
      labels.push_back(s.label);
    }
    if (auto s = WriteIdxImages(dir + "/" + stem + "-images.idx", images, 1,
                                bundle.feature_dim);
        !s.ok()) {
      return s;
    }
    return WriteIdxLabels(dir + "/" + stem + "-labels.idx", labels);
  };
  if (auto s = write(train, "train"); !s.ok()) return s;
  return write(bundle.test_set, "test");
}

}  // namespace dpfl
