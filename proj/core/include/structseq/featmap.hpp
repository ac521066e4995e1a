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
#include <span>
#include <vector>

#include "structseq/seqcore.hpp"

namespace structseq {

enum class FeatureOrder { First = 1, Second = 2 };

// dK + K^2 for First, dK^2 + K^3 for Second.
std::size_t feature_dim(FeatureOrder order, std::size_t num_labels, std::size_t dim);

// Joint feature vector of an (acoustic sequence, label sequence) pair.
//
// First order, K labels, d acoustic dims, M frames:
//   [0, dK)        per-label acoustic sums: section p holds (1/M) sum of x^j with y^j = p
//   [dK, dK + K^2) transition counts / M at dK + src*K + dst
// Second order:
//   [0, dK^2)        (1/M) sum_{j<M-1} x^j for label pair (y^j, y^j+1), at (src*K + dst)*d + k
//   [dK^2, +K^3)     (1/M) counts of label triples, at a*K^2 + b*K + c
struct StructuredFeature {
  std::vector<double> values;
  FeatureOrder order = FeatureOrder::First;
  std::size_t num_labels = 0;
  std::size_t dim = 0;
  std::size_t frames = 0;

  std::size_t size() const noexcept { return values.size(); }
  // Offset of the transition block.
  std::size_t transition_offset() const noexcept;
};

// One-hot vector of length K.
std::vector<double> indicator(Label label, std::size_t num_labels);

// out[i + j*P] = a[i] * b[j] for |a| = P, |b| = Q.
std::vector<double> tensor(std::span<const double> a, std::span<const double> b);

StructuredFeature psi(const AcousticSequence& x, std::span<const Label> labels,
                      std::size_t num_labels, FeatureOrder order);

// psi(x, y') where y' is `labels` with position j set to new_label. `feature` must equal
// psi(x, labels, ...); only the entries touched by position j are rewritten.
StructuredFeature psi_delta(const StructuredFeature& feature, const AcousticSequence& x,
                            std::span<const Label> labels, std::size_t j, Label new_label);
// In-place variant; `labels` still describes the sequence before the edit.
void apply_psi_delta(StructuredFeature& feature, const AcousticSequence& x,
                     std::span<const Label> labels, std::size_t j, Label new_label);

}  // namespace structseq
