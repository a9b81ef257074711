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

#include "dpfl/models.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <random>

#include "absl/strings/str_cat.h"
#include "dpfl/rng.h"

namespace dpfl {
namespace {

constexpr char kBlobMagic[8] = {'D', 'P', 'F', 'L', 'M', 'D', 'L', '1'};
constexpr size_t kBlobHeaderSize = 8 + 4 * 4 + 8;

struct Layer {
  size_t weight_offset;
  size_t bias_offset;
  int in;
  int out;
};

std::vector<Layer> Layers(const ModelArch& arch) {
  std::vector<Layer> layers;
  size_t offset = 0;
  auto add = [&](int in, int out) {
    Layer l{offset, offset + static_cast<size_t>(in) * out, in, out};
    offset = l.bias_offset + out;
    layers.push_back(l);
  };
  if (arch.kind == ModelKind::kLogisticRegression) {
    add(arch.feature_dim, arch.num_classes);
  } else {
    add(arch.feature_dim, arch.hidden_units);
    add(arch.hidden_units, arch.num_classes);
  }
  return layers;
}

// out = W x + b for one layer.
void Affine(const std::vector<double>& w, const Layer& l, const double* x,
            double* out) {
  for (int o = 0; o < l.out; ++o) {
    const double* row =
        w.data() + l.weight_offset + static_cast<size_t>(o) * l.in;
    double acc = w[l.bias_offset + o];
    for (int i = 0; i < l.in; ++i) acc += row[i] * x[i];
    out[o] = acc;
  }
}

// Replaces logits by softmax probabilities; returns -log p[label].
double SoftmaxCrossEntropy(std::vector<double>& logits, int label) {
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  const double shifted_label_logit = logits[label] - max_logit;
  double sum = 0.0;
  for (double& z : logits) {
    z = std::exp(z - max_logit);
    sum += z;
  }
  const double loss = std::log(sum) - shifted_label_logit;
  for (double& z : logits) z /= sum;
  return loss;
}

// Gradient of a layer given d(loss)/d(out), accumulated with weight `scale`.
void AccumulateLayerGrad(const Layer& l, const double* x, const double* dout,
                         double scale, std::vector<double>& grad) {
  for (int o = 0; o < l.out; ++o) {
    const double d = dout[o] * scale;
    double* row = grad.data() + l.weight_offset + static_cast<size_t>(o) * l.in;
    for (int i = 0; i < l.in; ++i) row[i] += d * x[i];
    grad[l.bias_offset + o] += d;
  }
}

absl::Status CheckSample(const ModelArch& arch, const Sample& s) {
  if (static_cast<int>(s.features.size()) != arch.feature_dim) {
    return absl::InvalidArgumentError(
        absl::StrCat("sample has ", s.features.size(),
                     " features, model expects ", arch.feature_dim));
  }
  if (s.label < 0 || s.label >= arch.num_classes) {
    return absl::InvalidArgumentError(absl::StrCat(
        "label ", s.label, " outside [0, ", arch.num_classes, ")"));
  }
  return absl::OkStatus();
}

// Shared forward/backward pass. When `grad` is null only the loss is
// computed.
template <typename SampleAt>
absl::StatusOr<double> Evaluate(const ModelParams& params, size_t n,
                                SampleAt sample_at, std::vector<double>* grad) {
  if (n == 0) return absl::InvalidArgumentError("empty batch");
  const ModelArch& arch = params.arch;
  if (params.weights.size() != arch.ParameterCount()) {
    return absl::InvalidArgumentError(
        absl::StrCat("model has ", params.weights.size(),
                     " weights, arch needs ", arch.ParameterCount()));
  }
  const std::vector<Layer> layers = Layers(arch);
  if (grad != nullptr) grad->assign(params.weights.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<double> hidden(arch.kind == ModelKind::kMlp ? arch.hidden_units
                                                          : 0);
  std::vector<double> dhidden(hidden.size());
  std::vector<double> logits(arch.num_classes);
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const Sample& s = sample_at(i);
    if (auto st = CheckSample(arch, s); !st.ok()) return st;
    const double* x = s.features.data();
    if (arch.kind == ModelKind::kLogisticRegression) {
      Affine(params.weights, layers[0], x, logits.data());
    } else {
      Affine(params.weights, layers[0], x, hidden.data());
      for (double& h : hidden) h = std::tanh(h);
      Affine(params.weights, layers[1], hidden.data(), logits.data());
    }
    total += SoftmaxCrossEntropy(logits, s.label);
    if (grad == nullptr) continue;

    // logits now holds p; d(loss)/d(logit) = p - onehot.
    logits[s.label] -= 1.0;
    if (arch.kind == ModelKind::kLogisticRegression) {
      AccumulateLayerGrad(layers[0], x, logits.data(), inv_n, *grad);
    } else {
      const Layer& out = layers[1];
      AccumulateLayerGrad(out, hidden.data(), logits.data(), inv_n, *grad);
      for (int h = 0; h < out.in; ++h) {
        double acc = 0.0;
        for (int o = 0; o < out.out; ++o) {
          acc += params.weights[out.weight_offset +
                                static_cast<size_t>(o) * out.in + h] *
                 logits[o];
        }
        dhidden[h] = acc * (1.0 - hidden[h] * hidden[h]);
      }
      AccumulateLayerGrad(layers[0], x, dhidden.data(), inv_n, *grad);
    }
  }
  return total * inv_n;
}

void PutLe32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void PutLe64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i)
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
uint64_t GetLe(absl::string_view in, size_t offset, int bytes) {
  uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    v |= uint64_t{static_cast<uint8_t>(in[offset + i])} << (8 * i);
  }
  return v;
}

}  // namespace

ModelArch ModelArch::LogisticRegression(int feature_dim, int num_classes) {
  return ModelArch{ModelKind::kLogisticRegression, feature_dim, num_classes, 0};
}

ModelArch ModelArch::Mlp(int feature_dim, int hidden_units, int num_classes) {
  return ModelArch{ModelKind::kMlp, feature_dim, num_classes, hidden_units};
}

size_t ModelArch::ParameterCount() const {
  const size_t d = feature_dim;
  const size_t c = num_classes;
  if (kind == ModelKind::kLogisticRegression) return d * c + c;
  const size_t h = hidden_units;
  return d * h + h + h * c + c;
}

bool ModelArch::Valid() const {
  if (feature_dim <= 0 || num_classes < 2) return false;
  return kind == ModelKind::kLogisticRegression || hidden_units > 0;
}

ModelParams InitParams(const ModelArch& arch, uint64_t seed) {
  ModelParams params{arch, std::vector<double>(arch.ParameterCount(), 0.0)};
  Rng rng = MakeRng(seed, 0, 0, RngStream::kInit);
  for (const Layer& l : Layers(arch)) {
    const double s = std::sqrt(6.0 / static_cast<double>(l.in + l.out));
    std::uniform_real_distribution<double> uniform(-s, s);
    for (size_t i = l.weight_offset; i < l.bias_offset; ++i) {
      params.weights[i] = uniform(rng);
    }
  }
  return params;
}

absl::StatusOr<LossAndGradient> ComputeLossAndGradient(
    const ModelParams& params, BatchView batch) {
  LossAndGradient out;
  auto loss = Evaluate(
      params, batch.size(),
      [&](size_t i) -> const Sample& { return *batch[i]; }, &out.gradient);
  if (!loss.ok()) return loss.status();
  out.loss = *loss;
  return out;
}

absl::StatusOr<LossAndGradient> ComputeLossAndGradient(
    const ModelParams& params, std::span<const Sample> batch) {
  LossAndGradient out;
  auto loss = Evaluate(
      params, batch.size(), [&](size_t i) -> const Sample& { return batch[i]; },
      &out.gradient);
  if (!loss.ok()) return loss.status();
  out.loss = *loss;
  return out;
}

absl::StatusOr<double> EvalTestLoss(const ModelParams& params,
                                    std::span<const Sample> test_set) {
  return Evaluate(
      params, test_set.size(),
      [&](size_t i) -> const Sample& { return test_set[i]; }, nullptr);
}

ModelParams SgdStep(const ModelParams& params, std::span<const double> grad,
                    double eta) {
  ModelParams out = params;
  for (size_t i = 0; i < out.weights.size(); ++i) {
    out.weights[i] = out.weights[i] - eta * grad[i];
  }
  return out;
}

MomentumSgd::MomentumSgd(size_t num_weights, double learning_rate,
                         double momentum)
    : learning_rate_(learning_rate),
      momentum_(momentum),
      velocity_(num_weights, 0.0) {}

void MomentumSgd::Step(std::vector<double>& weights,
                       std::span<const double> grad) {
  for (size_t i = 0; i < weights.size(); ++i) {
    velocity_[i] = momentum_ * velocity_[i] + grad[i];
    weights[i] = weights[i] - learning_rate_ * velocity_[i];
  }
}

std::string SerializeParams(const ModelParams& params) {
  std::string out(kBlobMagic, sizeof(kBlobMagic));
  PutLe32(out, static_cast<uint32_t>(params.arch.kind));
  PutLe32(out, static_cast<uint32_t>(params.arch.feature_dim));
  PutLe32(out, static_cast<uint32_t>(params.arch.num_classes));
  PutLe32(out, static_cast<uint32_t>(params.arch.hidden_units));
  PutLe64(out, params.weights.size());
  for (double w : params.weights) PutLe64(out, std::bit_cast<uint64_t>(w));
  return out;
}

absl::StatusOr<ModelParams> DeserializeParams(absl::string_view blob) {
  if (blob.size() < kBlobHeaderSize ||
      std::memcmp(blob.data(), kBlobMagic, sizeof(kBlobMagic)) != 0) {
    return absl::InvalidArgumentError("not a model checkpoint");
  }
  ModelParams params;
  const uint64_t kind = GetLe(blob, 8, 4);
  if (kind > static_cast<uint64_t>(ModelKind::kMlp)) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown model kind ", kind));
  }
  params.arch.kind = static_cast<ModelKind>(kind);
  params.arch.feature_dim = static_cast<int>(GetLe(blob, 12, 4));
  params.arch.num_classes = static_cast<int>(GetLe(blob, 16, 4));
  params.arch.hidden_units = static_cast<int>(GetLe(blob, 20, 4));
  const uint64_t count = GetLe(blob, 24, 8);
  if (!params.arch.Valid() || count != params.arch.ParameterCount()) {
    return absl::InvalidArgumentError("checkpoint header is inconsistent");
  }
  if (blob.size() != kBlobHeaderSize + count * 8) {
    return absl::DataLossError("checkpoint payload has the wrong length");
  }
  params.weights.resize(count);
  for (uint64_t i = 0; i < count; ++i) {
    params.weights[i] =
        std::bit_cast<double>(GetLe(blob, kBlobHeaderSize + 8 * i, 8));
  }
  return params;
}

}  // namespace dpfl
