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

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "structseq/scorer.hpp"
#include "structseq/seqcore.hpp"

namespace structseq {

enum class TrainMode { WithoutLattice, WithLattice };

struct TrainConfig {
  std::size_t epochs = 30;
  double learning_rate = 0.05;
  LossForm loss_form = LossForm::Bce;
  FeatureOrder order = FeatureOrder::First;
  TrainMode mode = TrainMode::WithLattice;
  std::size_t hidden_layers = 1;
  std::size_t hidden = 64;
  std::size_t nbest = 50;
  std::size_t num_random = 50;  // random negatives per utterance and epoch
  std::size_t restarts = 4;     // coordinate-ascent restarts (without lattice)
  std::size_t max_passes = 50;
  AccuracyVariant accuracy = AccuracyVariant::Frame;
  double heldout_fraction = 0.1;
  // Draw random negatives from N-best ranks [N, 4N) instead of the full label space.
  bool random_from_nbest_pool = false;
  std::uint64_t seed = 0;

  void validate() const;
};

struct LinearTrainConfig {
  std::size_t epochs = 30;
  double learning_rate = 1.0;
  double heldout_fraction = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;
  double heldout_frame_acc = 0.0;  // NaN without a held-out split
  double heldout_per = 0.0;
  std::size_t num_examples = 0;
  std::array<std::size_t, 4> examples_by_tag{};  // indexed by SequenceTag
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
};

// epoch,loss,heldout_frame_acc,heldout_per,num_examples
void write_report_csv(std::ostream& out, const TrainReport& report);

// Last ceil(fraction * n) utterances are held out; at least one utterance stays in training.
std::pair<std::vector<const Utterance*>, std::vector<const Utterance*>> split_heldout(
    const Dataset& data, double fraction);

// Averaged structured perceptron over Viterbi decodes: on a mistake,
// theta += lr * (psi(x, t) - psi(x, y_hat)). Returns the averaged weights.
// Report loss is the summed margin violation score(y_hat) - score(t).
std::pair<LinearModel, TrainReport> train_linear(const Dataset& data, const LinearTrainConfig& config);

// Per epoch and utterance: the reference, config.num_random random sequences and the
// coordinate-ascent decode under the current network, weighted by label accuracy; one
// gradient step per utterance.
std::pair<NetworkModel, TrainReport> train_sdnn_without_lattice(const Dataset& data,
                                                                const TrainConfig& config);

// Per utterance: reference + N-best under `generator` (computed once) + fresh random
// sequences each epoch, weighted by label accuracy; one gradient step per utterance.
std::pair<NetworkModel, TrainReport> train_sdnn_with_lattice(const Dataset& data,
                                                             const LinearModel& generator,
                                                             const TrainConfig& config);

// Layer sizes [dim(psi), hidden x hidden_layers, 1].
std::vector<std::size_t> network_sizes(FeatureOrder order, std::size_t num_labels, std::size_t dim,
                                       std::size_t hidden_layers, std::size_t hidden);

}  // namespace structseq
