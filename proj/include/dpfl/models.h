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

#ifndef DPFL_MODELS_H_
#define DPFL_MODELS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dpfl/datasets.h"

namespace dpfl {

enum class ModelKind { kLogisticRegression, kMlp };

// Multinomial logistic regression, or one tanh hidden layer followed by a
// softmax layer. Weights live in one flat vector laid out layer by layer,
// each layer as a row-major (out x in) matrix followed by its bias.
struct ModelArch {
  ModelKind kind = ModelKind::kLogisticRegression;
  int feature_dim = 0;
  int num_classes = 0;
  int hidden_units = 0;  // kMlp only

  static ModelArch LogisticRegression(int feature_dim, int num_classes);
  static ModelArch Mlp(int feature_dim, int hidden_units, int num_classes);

  size_t ParameterCount() const;
  bool Valid() const;

  friend bool operator==(const ModelArch&, const ModelArch&) = default;
};

struct ModelParams {
  ModelArch arch;
  std::vector<double> weights;
};

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};

// Pointers into a shard, so sampled batches do not copy features.
using BatchView = std::span<const Sample* const>;

// Weights uniform in [-s, s], s = sqrt(6 / (fan_in + fan_out)) per layer;
// biases start at zero.
ModelParams InitParams(const ModelArch& arch, uint64_t seed);

// Mean cross-entropy over the batch and its exact gradient.
// InvalidArgument on an empty batch, a feature-dimension mismatch or a label
// outside [0, num_classes).
absl::StatusOr<LossAndGradient> ComputeLossAndGradient(
    const ModelParams& params, BatchView batch);
absl::StatusOr<LossAndGradient> ComputeLossAndGradient(
    const ModelParams& params, std::span<const Sample> batch);

// Mean cross-entropy over the whole test set.
absl::StatusOr<double> EvalTestLoss(const ModelParams& params,
                                    std::span<const Sample> test_set);

// w - eta * g.
ModelParams SgdStep(const ModelParams& params, std::span<const double> grad,
                    double eta);

// Heavy-ball SGD: v <- momentum * v + g; w <- w - eta * v. With momentum 0
// this performs exactly the arithmetic of SgdStep.
class MomentumSgd {
 public:
  MomentumSgd(size_t num_weights, double learning_rate, double momentum);

  void Step(std::vector<double>& weights, std::span<const double> grad);

 private:
  double learning_rate_;
  double momentum_;
  std::vector<double> velocity_;
};

// Checkpoint blob: "DPFLMDL1", four little-endian uint32 (kind, feature_dim,
// num_classes, hidden_units), a little-endian uint64 weight count, then the
// weights as little-endian IEEE-754 doubles.
std::string SerializeParams(const ModelParams& params);
absl::StatusOr<ModelParams> DeserializeParams(absl::string_view blob);

}  // namespace dpfl

#endif  // DPFL_MODELS_H_
