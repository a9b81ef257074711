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

#ifndef DPFL_DATASETS_H_
#define DPFL_DATASETS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dpfl {

// A feature-label pair. IDX images are scaled to [0,1]; synthetic features
// are raw Gaussian coordinates.
struct Sample {
  std::vector<double> features;
  int label = 0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

// The private training data held by one simulated client.
struct DataShard {
  int client_id = 0;
  std::vector<Sample> samples;
};

struct DatasetBundle {
  std::vector<DataShard> train_shards;
  std::vector<Sample> test_set;
  int num_classes = 0;
  int feature_dim = 0;

  // All training samples, shard by shard.
  std::vector<Sample> TrainSamples() const;
  size_t TrainSize() const;
};

inline constexpr uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr uint32_t kIdxLabelsMagic = 0x00000801;

// IDX images file (big-endian header: magic, count, rows, cols). Each image
// becomes one row of rows*cols values, byte b mapped to b/255.
//
// Errors: NotFound if the file cannot be opened, InvalidArgument for a bad
// or missing magic, DataLoss when the payload is shorter than the header
// promises.
absl::StatusOr<std::vector<std::vector<double>>> LoadIdxImages(
    const std::string& path);

// IDX labels file (magic, count), one byte per label.
absl::StatusOr<std::vector<int>> LoadIdxLabels(const std::string& path);

// Inverse of LoadIdxImages. Values are clamped to [0,1] and quantized to
// round(v*255), so rows that came from LoadIdxImages round-trip exactly.
absl::Status WriteIdxImages(const std::string& path,
                            const std::vector<std::vector<double>>& images,
                            int rows, int cols);
absl::Status WriteIdxLabels(const std::string& path,
                            std::span<const int> labels);

// Pairs an images file with its labels file.
absl::StatusOr<std::vector<Sample>> LoadIdxSamples(
    const std::string& images_path, const std::string& labels_path);

// Balanced Gaussian blobs. Class c has mean 3.0 * e_(c mod d), negated for
// every other wrap-around when num_classes > feature_dim, and identity
// covariance. Sample i has label i mod num_classes. The returned bundle holds
// the whole training set in a single shard for client 0; call Repartition to
// spread it over K clients.
absl::StatusOr<DatasetBundle> SynthDataset(int num_classes, int feature_dim,
                                           int n_train, int n_test,
                                           uint64_t seed);

inline constexpr double kSynthClassSeparation = 3.0;

// Shuffles with `seed` and cuts into K contiguous shards whose sizes differ
// by at most one (the first n mod K shards get the extra sample).
absl::StatusOr<std::vector<DataShard>> PartitionIid(
    std::span<const Sample> samples, int num_clients, uint64_t seed);

// Flattens the training shards and partitions them again over K clients.
absl::StatusOr<DatasetBundle> Repartition(const DatasetBundle& bundle,
                                          int num_clients, uint64_t seed);

// Keeps round(fraction * n) training samples chosen uniformly without
// replacement (at least one, and at least num_clients so that every client
// can hold data), then partitions them over K clients. The test set is kept.
absl::StatusOr<DatasetBundle> SubsampleTrain(const DatasetBundle& bundle,
                                             double fraction, int num_clients,
                                             uint64_t seed);

// Writes train/test images and labels as four IDX files under `dir`
// (train-images.idx, train-labels.idx, test-images.idx, test-labels.idx).
// Features are min-max scaled over the whole bundle before quantization, so
// the export is lossy for data that is not already on the 1/255 lattice.
absl::Status ExportIdx(const DatasetBundle& bundle, const std::string& dir);

}  // namespace dpfl

#endif  // DPFL_DATASETS_H_
