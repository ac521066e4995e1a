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


#include "structseq/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "structseq/errors.hpp"

namespace structseq {

namespace {

void check_finite(double v, const char* where) {
  if (!std::isfinite(v)) throw NumericError(std::string("non-finite value in ") + where);
}

// Activations of every layer: acts[0] = input, acts[l] = sigmoid output of layer l-1
// for hidden layers. The output logit is returned separately.
struct ForwardTrace {
  std::vector<std::vector<double>> acts;
  double logit = 0.0;
};

void check_input(const NetworkModel& model, std::span<const double> input) {
  if (model.layers.empty()) throw ShapeError("network has no layers");
  if (input.size() != model.input_size()) {
    throw ShapeError("network expects " + std::to_string(model.input_size()) +
                     " inputs, got " + std::to_string(input.size()));
  }
}

void run_forward(const NetworkModel& model, std::span<const double> input, ForwardTrace& trace) {
  check_input(model, input);
  const std::size_t n = model.layers.size();
  trace.acts.resize(n);
  trace.acts[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < n; ++l) {
    const Layer& layer = model.layers[l];
    const std::vector<double>& h = trace.acts[l];
    if (l + 1 == n) {
      double z = layer.bias[0];
      for (std::size_t c = 0; c < layer.in; ++c) z += layer.weights[c] * h[c];
      check_finite(z, "network output");
      trace.logit = z;
      return;
    }
    std::vector<double>& next = trace.acts[l + 1];
    next.resize(layer.out);
    for (std::size_t r = 0; r < layer.out; ++r) {
      const double* row = layer.weights.data() + r * layer.in;
      double z = layer.bias[r];
      for (std::size_t c = 0; c < layer.in; ++c) z += row[c] * h[c];
      check_finite(z, "hidden layer");
      next[r] = sigmoid(z);
    }
  }
}

// d loss / d logit for one example.
double output_delta(double logit, double weight, LossForm form) {
  const double f = sigmoid(logit);
  return form == LossForm::Paper ? -weight * (1.0 - f) : f - weight;
}

double example_loss(double logit, double weight, LossForm form) {
  double value = -weight * log_sigmoid(logit);
  if (form == LossForm::Bce) value -= (1.0 - weight) * log_sigmoid(-logit);
  return value;
}

void check_weight(double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw ShapeError("example weight outside [0, 1]");
}

}  // namespace

LinearModel LinearModel::zeros(FeatureOrder order, std::size_t num_labels, std::size_t dim) {
  return LinearModel{order, num_labels, dim,
                     std::vector<double>(feature_dim(order, num_labels, dim), 0.0)};
}

void LinearModel::validate() const {
  if (num_labels == 0 || dim == 0) throw ShapeError("linear model needs K >= 1 and d >= 1");
  if (theta.size() != feature_dim(order, num_labels, dim)) {
    throw ShapeError("linear model has " + std::to_string(theta.size()) + " weights, expected " +
                     std::to_string(feature_dim(order, num_labels, dim)));
  }
}

double linear_score(const LinearModel& model, const StructuredFeature& feature) {
  if (feature.values.size() != model.theta.size() || feature.order != model.order) {
    throw ShapeError("linear model dimension " + std::to_string(model.theta.size()) +
                     " does not match feature dimension " + std::to_string(feature.values.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < model.theta.size(); ++i) s += model.theta[i] * feature.values[i];
  return s;
}

LinearPotentials decompose_linear(const LinearModel& model) {
  if (model.order != FeatureOrder::First) {
    throw ShapeError("only first-order linear models decompose into unary/pairwise potentials");
  }
  model.validate();
  const std::size_t k = model.num_labels;
  const std::size_t d = model.dim;
  LinearPotentials p;
  p.num_labels = k;
  p.dim = d;
  p.unary.assign(model.theta.begin(), model.theta.begin() + static_cast<std::ptrdiff_t>(k * d));
  p.pairwise.assign(model.theta.begin() + static_cast<std::ptrdiff_t>(k * d), model.theta.end());
  return p;
}

std::vector<std::size_t> NetworkModel::layer_sizes() const {
  std::vector<std::size_t> sizes;
  if (layers.empty()) return sizes;
  sizes.push_back(layers.front().in);
  for (const auto& layer : layers) sizes.push_back(layer.out);
  return sizes;
}

std::size_t NetworkModel::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.weights.size() + layer.bias.size();
  return n;
}

void NetworkModel::validate() const {
  if (layers.empty()) throw ShapeError("network has no layers");
  if (layers.back().out != 1) throw ShapeError("network output size must be 1");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Layer& layer = layers[l];
    if (layer.in == 0 || layer.out == 0) throw ShapeError("network layer of size zero");
    if (l > 0 && layers[l - 1].out != layer.in) throw ShapeError("network layer sizes do not chain");
    if (layer.weights.size() != layer.in * layer.out || layer.bias.size() != layer.out) {
      throw ShapeError("network layer " + std::to_string(l) + " has inconsistent storage");
    }
    for (double w : layer.weights) {
      if (!std::isfinite(w)) throw NumericError("network weight is not finite");
    }
    for (double b : layer.bias) {
      if (!std::isfinite(b)) throw NumericError("network bias is not finite");
    }
  }
  if (num_labels > 0 && dim > 0 && layers.front().in != feature_dim(order, num_labels, dim)) {
    throw ShapeError("network input size does not match the feature dimension");
  }
}

NetworkGradient NetworkGradient::zeros_like(const NetworkModel& model) {
  NetworkGradient g;
  g.layers.reserve(model.layers.size());
  for (const auto& layer : model.layers) {
    g.layers.push_back(Layer{layer.in, layer.out, std::vector<double>(layer.weights.size(), 0.0),
                             std::vector<double>(layer.bias.size(), 0.0)});
  }
  return g;
}

double NetworkGradient::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& layer : layers) {
    for (double v : layer.weights) m = std::max(m, std::abs(v));
    for (double v : layer.bias) m = std::max(m, std::abs(v));
  }
  return m;
}

void apply_gradient(NetworkModel& model, const NetworkGradient& gradient, double step) {
  if (gradient.layers.size() != model.layers.size()) throw ShapeError("gradient shape mismatch");
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    auto& layer = model.layers[l];
    const auto& g = gradient.layers[l];
    if (g.weights.size() != layer.weights.size() || g.bias.size() != layer.bias.size()) {
      throw ShapeError("gradient shape mismatch");
    }
    for (std::size_t i = 0; i < layer.weights.size(); ++i) layer.weights[i] -= step * g.weights[i];
    for (std::size_t i = 0; i < layer.bias.size(); ++i) layer.bias[i] -= step * g.bias[i];
  }
}

NetworkModel init_network(std::span<const std::size_t> layer_sizes, std::uint64_t seed,
                          FeatureOrder order, std::size_t num_labels, std::size_t dim) {
  if (layer_sizes.size() < 2) throw ShapeError("network needs at least input and output sizes");
  if (layer_sizes.back() != 1) throw ShapeError("network output size must be 1");
  for (std::size_t s : layer_sizes) {
    if (s == 0) throw ShapeError("network layer of size zero");
  }
  NetworkModel model;
  model.order = order;
  model.num_labels = num_labels;
  model.dim = dim;
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    Layer layer;
    layer.in = layer_sizes[l];
    layer.out = layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    layer.weights.resize(layer.in * layer.out);
    for (double& w : layer.weights) w = dist(rng);
    layer.bias.assign(layer.out, 0.0);
    model.layers.push_back(std::move(layer));
  }
  model.validate();
  return model;
}

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double log_sigmoid(double z) noexcept {
  if (z >= 0.0) return -std::log1p(std::exp(-z));
  return z - std::log1p(std::exp(z));
}

double forward_logit(const NetworkModel& model, std::span<const double> input) {
  ForwardTrace trace;
  run_forward(model, input, trace);
  return trace.logit;
}

double forward(const NetworkModel& model, std::span<const double> input) {
  // Saturated logits would round to exactly 0 or 1; keep the open interval.
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = std::nextafter(1.0, 0.0);
  return std::clamp(sigmoid(forward_logit(model, input)), lo, hi);
}

LabelSequence collapse(std::span<const Label> labels) {
  LabelSequence out;
  for (Label l : labels) {
    if (out.empty() || out.back() != l) out.push_back(l);
  }
  return out;
}

std::size_t edit_distance(std::span<const Label> a, std::span<const Label> b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double label_accuracy(std::span<const Label> reference, std::span<const Label> hypothesis,
                      AccuracyVariant variant) {
  if (reference.empty() || hypothesis.empty()) throw ShapeError("label accuracy of an empty sequence");
  if (variant == AccuracyVariant::Frame) {
    if (reference.size() != hypothesis.size()) {
      throw ShapeError("frame accuracy needs equal lengths (" + std::to_string(reference.size()) +
                       " vs " + std::to_string(hypothesis.size()) + ")");
    }
    std::size_t hits = 0;
    for (std::size_t j = 0; j < reference.size(); ++j) hits += reference[j] == hypothesis[j];
    return static_cast<double>(hits) / static_cast<double>(reference.size());
  }
  const LabelSequence t = collapse(reference);
  const LabelSequence y = collapse(hypothesis);
  const double err = static_cast<double>(edit_distance(t, y)) / static_cast<double>(t.size());
  return std::max(0.0, 1.0 - err);
}

double loss(const NetworkModel& model, std::span<const ScoredExample> batch, LossForm form) {
  double total = 0.0;
  for (const auto& ex : batch) {
    check_weight(ex.weight);
    total += example_loss(forward_logit(model, ex.feature.values), ex.weight, form);
  }
  return total;
}

NetworkGradient loss_gradient(const NetworkModel& model, std::span<const ScoredExample> batch,
                              LossForm form, double* value) {
  NetworkGradient grad = NetworkGradient::zeros_like(model);
  const std::size_t n = model.layers.size();
  ForwardTrace trace;
  std::vector<double> delta, prev_delta;
  double total = 0.0;

  for (const auto& ex : batch) {
    check_weight(ex.weight);
    run_forward(model, ex.feature.values, trace);
    total += example_loss(trace.logit, ex.weight, form);

    delta.assign(1, output_delta(trace.logit, ex.weight, form));
    for (std::size_t l = n; l-- > 0;) {
      const Layer& layer = model.layers[l];
      Layer& g = grad.layers[l];
      const std::vector<double>& h = trace.acts[l];
      for (std::size_t r = 0; r < layer.out; ++r) {
        const double dr = delta[r];
        if (dr == 0.0) continue;
        double* grow = g.weights.data() + r * layer.in;
        for (std::size_t c = 0; c < layer.in; ++c) grow[c] += dr * h[c];
        g.bias[r] += dr;
      }
      if (l == 0) break;
      // Back through the sigmoid that produced h.
      prev_delta.assign(layer.in, 0.0);
      for (std::size_t r = 0; r < layer.out; ++r) {
        const double dr = delta[r];
        if (dr == 0.0) continue;
        const double* row = layer.weights.data() + r * layer.in;
        for (std::size_t c = 0; c < layer.in; ++c) prev_delta[c] += row[c] * dr;
      }
      for (std::size_t c = 0; c < layer.in; ++c) prev_delta[c] *= h[c] * (1.0 - h[c]);
      std::swap(delta, prev_delta);
    }
  }
  if (value) *value = total;
  return grad;
}

}  // namespace structseq
