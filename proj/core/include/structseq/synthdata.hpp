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
#include <vector>

#include "structseq/seqcore.hpp"

namespace structseq {

// Planted first-order HMM with isotropic Gaussian emissions.
struct GeneratorSpec {
  std::size_t num_labels = 5;
  std::size_t dim = 8;
  std::size_t min_len = 20;
  std::size_t max_len = 40;
  std::vector<double> transition;      // K x K, row-stochastic
  std::vector<double> emission_means;  // K x d
  double emission_std = 0.8;
  std::size_t num_utterances = 250;
  std::uint64_t seed = 7;

  // Self-loop probability p on the diagonal, (1 - p) / (K - 1) elsewhere.
  static std::vector<double> self_loop_transition(std::size_t num_labels, double self_loop);
  // Means drawn i.i.d. from N(0, 1) under `seed`.
  static std::vector<double> random_means(std::size_t num_labels, std::size_t dim, std::uint64_t seed);
  // Seed of the emission means derived from a corpus seed.
  static std::uint64_t means_seed(std::uint64_t corpus_seed);
  // K=5, d=8, lengths 20..40, self-loop 0.8, std 0.8, 250 utterances.
  static GeneratorSpec benchmark(std::uint64_t seed = 7);

  void validate() const;
};

// Label tokens p0, p1, ..., p{K-1}.
Vocabulary generator_vocabulary(std::size_t num_labels);

// Utterance ids utt00000, utt00001, ...; lengths uniform in [min_len, max_len], initial
// label uniform, frames = mean of the label + N(0, std^2) noise per dimension.
Dataset generate(const GeneratorSpec& spec);

// Stationary distribution of a row-stochastic matrix by power iteration.
std::vector<double> stationary_distribution(const std::vector<double>& transition, std::size_t num_labels);

}  // namespace structseq
