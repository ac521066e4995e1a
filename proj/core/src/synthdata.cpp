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


#include "structseq/synthdata.hpp"

#include <cmath>
#include <cstdio>

#include "structseq/errors.hpp"
#include "structseq/random.hpp"

namespace structseq {

std::vector<double> GeneratorSpec::self_loop_transition(std::size_t num_labels, double self_loop) {
  if (num_labels == 0) throw ShapeError("transition needs K >= 1");
  if (!(self_loop > 0.0 && self_loop <= 1.0)) throw ShapeError("self-loop probability must be in (0, 1]");
  std::vector<double> t(num_labels * num_labels);
  const double off = num_labels > 1 ? (1.0 - self_loop) / static_cast<double>(num_labels - 1) : 0.0;
  for (std::size_t p = 0; p < num_labels; ++p) {
    for (std::size_t q = 0; q < num_labels; ++q) t[p * num_labels + q] = p == q ? self_loop : off;
  }
  if (num_labels == 1) t[0] = 1.0;
  return t;
}

std::vector<double> GeneratorSpec::random_means(std::size_t num_labels, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> means(num_labels * dim);
  for (double& v : means) v = normal(rng);
  return means;
}

std::uint64_t GeneratorSpec::means_seed(std::uint64_t corpus_seed) {
  return derive_seed(corpus_seed, 0x6d65616e73);
}

GeneratorSpec GeneratorSpec::benchmark(std::uint64_t seed) {
  GeneratorSpec spec;
  spec.seed = seed;
  spec.transition = self_loop_transition(spec.num_labels, 0.8);
  spec.emission_means = random_means(spec.num_labels, spec.dim, means_seed(seed));
  return spec;
}

void GeneratorSpec::validate() const {
  if (num_labels == 0 || dim == 0) throw ShapeError("generator needs K >= 1 and d >= 1");
  if (min_len < 2) throw ShapeError("minimum utterance length must be at least 2");
  if (max_len < min_len) throw ShapeError("maximum utterance length is below the minimum");
  if (transition.size() != num_labels * num_labels) throw ShapeError("transition must be K x K");
  if (emission_means.size() != num_labels * dim) throw ShapeError("emission means must be K x d");
  if (!(emission_std >= 0.0) || !std::isfinite(emission_std)) throw ShapeError("emission std must be >= 0");
  for (std::size_t p = 0; p < num_labels; ++p) {
    double sum = 0.0;
    for (std::size_t q = 0; q < num_labels; ++q) {
      const double v = transition[p * num_labels + q];
      if (!(v >= 0.0)) throw ShapeError("transition probabilities must be non-negative");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ShapeError("transition row " + std::to_string(p) + " does not sum to 1");
  }
  for (double v : emission_means) {
    if (!std::isfinite(v)) throw ShapeError("emission means must be finite");
  }
}

Vocabulary generator_vocabulary(std::size_t num_labels) {
  std::vector<std::string> labels;
  for (std::size_t p = 0; p < num_labels; ++p) labels.push_back("p" + std::to_string(p));
  return Vocabulary(std::move(labels));
}

Dataset generate(const GeneratorSpec& spec) {
  spec.validate();
  const std::size_t k = spec.num_labels;
  const std::size_t d = spec.dim;
  Rng rng(spec.seed);
  std::uniform_int_distribution<std::size_t> length(spec.min_len, spec.max_len);
  std::uniform_int_distribution<Label> initial(0, static_cast<Label>(k) - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, spec.emission_std > 0.0 ? spec.emission_std : 1.0);

  auto next_label = [&](Label from) {
    const double* row = spec.transition.data() + static_cast<std::size_t>(from) * k;
    const double u = unit(rng);
    double acc = 0.0;
    for (std::size_t q = 0; q < k; ++q) {
      acc += row[q];
      if (u < acc) return static_cast<Label>(q);
    }
    // Rounding left u above the final cumulative sum; take the last reachable state.
    for (std::size_t q = k; q-- > 0;) {
      if (row[q] > 0.0) return static_cast<Label>(q);
    }
    return from;
  };

  std::vector<Utterance> utterances;
  utterances.reserve(spec.num_utterances);
  for (std::size_t u = 0; u < spec.num_utterances; ++u) {
    const std::size_t m = length(rng);
    LabelSequence y(m);
    y[0] = initial(rng);
    for (std::size_t j = 1; j < m; ++j) y[j] = next_label(y[j - 1]);
    std::vector<double> frames(m * d);
    for (std::size_t j = 0; j < m; ++j) {
      const double* mean = spec.emission_means.data() + static_cast<std::size_t>(y[j]) * d;
      for (std::size_t c = 0; c < d; ++c) {
        frames[j * d + c] = spec.emission_std > 0.0 ? mean[c] + noise(rng) : mean[c];
      }
    }
    char id[32];
    std::snprintf(id, sizeof id, "utt%05zu", u);
    utterances.emplace_back(id, AcousticSequence(m, d, std::move(frames)), std::move(y));
  }
  return Dataset(generator_vocabulary(k), std::move(utterances));
}

std::vector<double> stationary_distribution(const std::vector<double>& transition, std::size_t num_labels) {
  const std::size_t k = num_labels;
  std::vector<double> pi(k, 1.0 / static_cast<double>(k)), next(k);
  for (int iter = 0; iter < 10000; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t p = 0; p < k; ++p) {
      for (std::size_t q = 0; q < k; ++q) next[q] += pi[p] * transition[p * k + q];
    }
    double diff = 0.0;
    for (std::size_t q = 0; q < k; ++q) diff += std::abs(next[q] - pi[q]);
    pi.swap(next);
    if (diff < 1e-15) break;
  }
  return pi;
}

}  // namespace structseq
