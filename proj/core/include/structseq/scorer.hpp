// Copyright 2026 The structseq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "structseq/featmap.hpp"
#include "structseq/seqcore.hpp"

namespace structseq {

// Linear scoring function <theta, psi(x, y)>.
struct LinearModel {
  FeatureOrder order = FeatureOrder::First;
  std::size_t num_labels = 0;
  std::size_t dim = 0;
  std::vector<double> theta;

  static LinearModel zeros(FeatureOrder order, std::size_t num_labels, std::size_t dim);
  // Throws ShapeError if theta does not match the dimension law.
  void validate() const;

  bool operator==(const LinearModel&) const = default;
};

// Unary/pairwise potentials of a first-order linear model.
struct LinearPotentials {
  std::size_t num_labels = 0;
  std::size_t dim = 0;
  std::vector<double> unary;     // K x d, row p = weights of label p's acoustic section
  std::vector<double> pairwise;  // K x K, [src * K + dst]

  std::span<const double> unary_row(Label p) const {
    return {unary.data() + static_cast<std::size_t>(p) * dim, dim};
  }
  double transition(Label src, Label dst) const {
    return pairwise[static_cast<std::size_t>(src) * num_labels + static_cast<std::size_t>(dst)];
  }
};

double linear_score(const LinearModel& model, const StructuredFeature& feature);
LinearPotentials decompose_linear(const LinearModel& model);

// One fully connected layer; weights are out x in, row-major.
struct Layer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  double& w(std::size_t row, std::size_t col) { return weights[row * in + col]; }
  double w(std::size_t row, std::size_t col) const { return weights[row * in + col]; }

  bool operator==(const Layer&) const = default;
};

// Sigmoid network with scalar output: h1 = s(W0 psi + b0), ..., out = s(W_L h_L + b_L).
struct NetworkModel {
  FeatureOrder order = FeatureOrder::First;
  std::size_t num_labels = 0;
  std::size_t dim = 0;
  std::vector<Layer> layers;

  // [input, h1, ..., hL, 1]
  std::vector<std::size_t> layer_sizes() const;
  std::size_t hidden_layers() const noexcept { return layers.empty() ? 0 : layers.size() - 1; }
  std::size_t input_size() const noexcept { return layers.empty() ? 0 : layers.front().in; }
  std::size_t parameter_count() const noexcept;
  void validate() const;

  bool operator==(const NetworkModel&) const = default;
};

struct NetworkGradient {
  std::vector<Layer> layers;

  // Zero gradient shaped like `model`.
  static NetworkGradient zeros_like(const NetworkModel& model);
  double max_abs() const noexcept;
};

// model -= step * gradient
void apply_gradient(NetworkModel& model, const NetworkGradient& gradient, double step);

// Xavier-uniform weights in [-sqrt(6/(in+out)), +sqrt(6/(in+out))], zero biases.
NetworkModel init_network(std::span<const std::size_t> layer_sizes, std::uint64_t seed,
                          FeatureOrder order = FeatureOrder::First, std::size_t num_labels = 0,
                          std::size_t dim = 0);

double sigmoid(double z) noexcept;
double log_sigmoid(double z) noexcept;

// Pre-activation of the output unit. Throws NumericError on non-finite intermediates.
double forward_logit(const NetworkModel& model, std::span<const double> input);
// Output in (0, 1).
double forward(const NetworkModel& model, std::span<const double> input);
inline double forward(const NetworkModel& model, const StructuredFeature& feature) {
  return forward(model, std::span<const double>(feature.values));
}

enum class AccuracyVariant { Frame, Phone };

// Removes consecutive repeats: (A, A, B, B, A) -> (A, B, A).
LabelSequence collapse(std::span<const Label> labels);
// Levenshtein distance with unit costs.
std::size_t edit_distance(std::span<const Label> a, std::span<const Label> b);

// Frame: fraction of agreeing positions. Phone: max(0, 1 - ED(collapse t, collapse y) / |collapse t|).
double label_accuracy(std::span<const Label> reference, std::span<const Label> hypothesis,
                      AccuracyVariant variant);

// Provenance of a candidate or training sequence.
enum class SequenceTag { Reference, Random, Inferenced, NBest };

struct ScoredExample {
  StructuredFeature feature;
  double weight = 0.0;  // label accuracy against the reference, in [0, 1]
  SequenceTag tag = SequenceTag::Random;
};

// Paper: -sum w log F.  Bce: -sum [w log F + (1 - w) log(1 - F)].
enum class LossForm { Paper, Bce };

double loss(const NetworkModel& model, std::span<const ScoredExample> batch, LossForm form);
// Exact gradient of loss(); `value`, when non-null, receives the loss.
NetworkGradient loss_gradient(const NetworkModel& model, std::span<const ScoredExample> batch,
                              LossForm form, double* value = nullptr);

}  // namespace structseq
