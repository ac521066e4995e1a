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
#include "structseq/scorer.hpp"
#include "structseq/seqcore.hpp"

namespace structseq {

// Deterministic score of a complete (x, y) pair.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::size_t num_labels() const = 0;
  virtual double score(const AcousticSequence& x, std::span<const Label> labels) const = 0;
};

// Scorer that factors through psi(x, y); lets inference use incremental feature updates.
class FeatureScorer : public Scorer {
 public:
  virtual FeatureOrder order() const = 0;
  virtual double score_feature(const StructuredFeature& feature) const = 0;

  double score(const AcousticSequence& x, std::span<const Label> labels) const final {
    return score_feature(psi(x, labels, num_labels(), order()));
  }
};

class LinearScorer final : public FeatureScorer {
 public:
  explicit LinearScorer(const LinearModel& model) : model_(model) { model_.validate(); }
  std::size_t num_labels() const override { return model_.num_labels; }
  FeatureOrder order() const override { return model_.order; }
  double score_feature(const StructuredFeature& f) const override { return linear_score(model_, f); }

 private:
  const LinearModel& model_;
};

// Scores with the output logit, a strictly increasing function of F2 that does not
// saturate to a constant for confident outputs.
class NetworkScorer final : public FeatureScorer {
 public:
  explicit NetworkScorer(const NetworkModel& model);
  std::size_t num_labels() const override { return model_.num_labels; }
  FeatureOrder order() const override { return model_.order; }
  double score_feature(const StructuredFeature& f) const override {
    return forward_logit(model_, f.values);
  }

 private:
  const NetworkModel& model_;
};

struct InferenceResult {
  LabelSequence labels;
  double score = 0.0;
  // Full passes (coordinate ascent) or candidates examined (search, rescoring).
  std::size_t iterations = 0;
  // Coordinate ascent only: score of the start sequence followed by every accepted update.
  std::vector<double> trace;
};

inline constexpr std::uint64_t kDefaultBruteForceCap = 2'000'000;

// Exhaustive argmax over all K^M sequences; ties go to the lexicographically smallest.
// Throws CapacityError when K^M exceeds `cap`.
InferenceResult brute_force(const AcousticSequence& x, const Scorer& scorer,
                            std::uint64_t cap = kDefaultBruteForceCap);

// One run from `init`: sweep j = 0..M-1, move y^j to the best label with the rest fixed
// (incumbent kept on ties), stop after a pass without changes or after max_passes.
InferenceResult coordinate_ascent(const AcousticSequence& x, const Scorer& scorer,
                                  std::span<const Label> init, std::size_t max_passes = 50);

struct CoordinateAscentOptions {
  std::size_t max_passes = 50;
  std::size_t restarts = 4;  // extra runs from uniform random sequences
  std::uint64_t seed = 0;
};

// Best of the run from `init` and `options.restarts` random restarts; earlier runs win ties.
InferenceResult coordinate_ascent(const AcousticSequence& x, const Scorer& scorer,
                                  std::span<const Label> init, const CoordinateAscentOptions& options);

// Highest-scoring candidate; the earliest wins ties.
InferenceResult rescore_candidates(const AcousticSequence& x,
                                   std::span<const LabelSequence> candidates, const Scorer& scorer);

// Exact argmax for a first-order linear model; backtrace ties go to the smaller label.
InferenceResult viterbi_linear(const AcousticSequence& x, const LinearModel& model);

}  // namespace structseq
