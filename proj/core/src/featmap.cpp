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


#include "structseq/featmap.hpp"

#include <cmath>
#include <string>

#include "structseq/errors.hpp"

namespace structseq {

namespace {

void check_label(Label label, std::size_t num_labels) {
  if (label < 0 || static_cast<std::size_t>(label) >= num_labels) {
    throw ShapeError("label " + std::to_string(label) + " outside [0, " +
                     std::to_string(num_labels) + ")");
  }
}

std::size_t idx(Label label) { return static_cast<std::size_t>(label); }

// Transition entries hold count/M; recover the count exactly and rescale so the
// result matches a from-scratch computation bit for bit.
void bump_count(double& entry, double delta, double frames, double inv) {
  entry = (std::nearbyint(entry * frames) + delta) * inv;
}

}  // namespace

std::size_t feature_dim(FeatureOrder order, std::size_t num_labels, std::size_t dim) {
  const std::size_t k = num_labels;
  return order == FeatureOrder::First ? dim * k + k * k : dim * k * k + k * k * k;
}

std::size_t StructuredFeature::transition_offset() const noexcept {
  return order == FeatureOrder::First ? dim * num_labels : dim * num_labels * num_labels;
}

std::vector<double> indicator(Label label, std::size_t num_labels) {
  check_label(label, num_labels);
  std::vector<double> out(num_labels, 0.0);
  out[idx(label)] = 1.0;
  return out;
}

std::vector<double> tensor(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.size() * b.size());
  for (std::size_t j = 0; j < b.size(); ++j) {
    for (std::size_t i = 0; i < a.size(); ++i) out[i + j * a.size()] = a[i] * b[j];
  }
  return out;
}

StructuredFeature psi(const AcousticSequence& x, std::span<const Label> labels,
                      std::size_t num_labels, FeatureOrder order) {
  validate_pair(x, labels, num_labels);
  const std::size_t k = num_labels;
  const std::size_t d = x.dim();
  const std::size_t m = x.frames();

  StructuredFeature f;
  f.order = order;
  f.num_labels = k;
  f.dim = d;
  f.frames = m;
  f.values.assign(feature_dim(order, k, d), 0.0);
  const std::size_t trans = f.transition_offset();
  auto& v = f.values;

  if (order == FeatureOrder::First) {
    for (std::size_t j = 0; j < m; ++j) {
      auto frame = x.frame(j);
      double* section = v.data() + idx(labels[j]) * d;
      for (std::size_t c = 0; c < d; ++c) section[c] += frame[c];
    }
    for (std::size_t j = 0; j + 1 < m; ++j) {
      v[trans + idx(labels[j]) * k + idx(labels[j + 1])] += 1.0;
    }
  } else {
    for (std::size_t j = 0; j + 1 < m; ++j) {
      auto frame = x.frame(j);
      double* section = v.data() + (idx(labels[j]) * k + idx(labels[j + 1])) * d;
      for (std::size_t c = 0; c < d; ++c) section[c] += frame[c];
    }
    for (std::size_t j = 0; j + 2 < m; ++j) {
      v[trans + idx(labels[j]) * k * k + idx(labels[j + 1]) * k + idx(labels[j + 2])] += 1.0;
    }
  }

  const double inv = 1.0 / static_cast<double>(m);
  for (double& e : v) e *= inv;
  return f;
}

void apply_psi_delta(StructuredFeature& f, const AcousticSequence& x,
                     std::span<const Label> labels, std::size_t j, Label new_label) {
  if (labels.size() != f.frames || x.frames() != f.frames || x.dim() != f.dim) {
    throw ShapeError("feature does not match the (x, y) pair");
  }
  if (j >= f.frames) {
    throw ShapeError("position " + std::to_string(j) + " outside [0, " +
                     std::to_string(f.frames) + ")");
  }
  check_label(new_label, f.num_labels);
  const Label old_label = labels[j];
  check_label(old_label, f.num_labels);
  if (old_label == new_label) return;

  const std::size_t k = f.num_labels;
  const std::size_t d = f.dim;
  const std::size_t m = f.frames;
  const double frames = static_cast<double>(m);
  const double inv = 1.0 / frames;
  const std::size_t trans = f.transition_offset();
  auto& v = f.values;

  auto move_frame = [&](std::size_t frame_index, std::size_t from, std::size_t to) {
    auto frame = x.frame(frame_index);
    double* src = v.data() + from * d;
    double* dst = v.data() + to * d;
    for (std::size_t c = 0; c < d; ++c) {
      const double w = frame[c] * inv;
      src[c] -= w;
      dst[c] += w;
    }
  };

  const std::size_t a = idx(old_label);
  const std::size_t b = idx(new_label);

  if (f.order == FeatureOrder::First) {
    move_frame(j, a, b);
    if (j > 0) {
      const std::size_t prev = idx(labels[j - 1]);
      bump_count(v[trans + prev * k + a], -1.0, frames, inv);
      bump_count(v[trans + prev * k + b], +1.0, frames, inv);
    }
    if (j + 1 < m) {
      const std::size_t next = idx(labels[j + 1]);
      bump_count(v[trans + a * k + next], -1.0, frames, inv);
      bump_count(v[trans + b * k + next], +1.0, frames, inv);
    }
    return;
  }

  // Second order: pair terms at frames j-1 and j, triple terms starting at j-2, j-1, j.
  if (j > 0) {
    const std::size_t prev = idx(labels[j - 1]);
    move_frame(j - 1, prev * k + a, prev * k + b);
  }
  if (j + 1 < m) {
    const std::size_t next = idx(labels[j + 1]);
    move_frame(j, a * k + next, b * k + next);
  }
  auto label_at = [&](std::size_t pos, std::size_t replacement) {
    return pos == j ? replacement : idx(labels[pos]);
  };
  for (std::size_t s = (j >= 2 ? j - 2 : 0); s <= j; ++s) {
    if (s + 2 >= m) break;
    const std::size_t before =
        label_at(s, a) * k * k + label_at(s + 1, a) * k + label_at(s + 2, a);
    const std::size_t after =
        label_at(s, b) * k * k + label_at(s + 1, b) * k + label_at(s + 2, b);
    bump_count(v[trans + before], -1.0, frames, inv);
    bump_count(v[trans + after], +1.0, frames, inv);
  }
}

StructuredFeature psi_delta(const StructuredFeature& feature, const AcousticSequence& x,
                            std::span<const Label> labels, std::size_t j, Label new_label) {
  StructuredFeature out = feature;
  apply_psi_delta(out, x, labels, j, new_label);
  return out;
}

}  // namespace structseq
