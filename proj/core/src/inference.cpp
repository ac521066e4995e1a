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


#include "structseq/inference.hpp"

#include <limits>
#include <string>

#include "structseq/errors.hpp"
#include "structseq/random.hpp"

namespace structseq {

NetworkScorer::NetworkScorer(const NetworkModel& model) : model_(model) {
  model_.validate();
  if (model_.num_labels == 0 || model_.dim == 0) {
    throw ShapeError("network model does not record K and d");
  }
}

InferenceResult brute_force(const AcousticSequence& x, const Scorer& scorer, std::uint64_t cap) {
  const std::size_t k = scorer.num_labels();
  const std::size_t m = x.frames();
  if (k == 0) throw ShapeError("scorer has no labels");
  std::uint64_t space = 1;
  for (std::size_t j = 0; j < m; ++j) {
    if (space > cap / k) {
      throw CapacityError("K^M exceeds the brute-force cap of " + std::to_string(cap));
    }
    space *= k;
  }
  if (space > cap) throw CapacityError("K^M exceeds the brute-force cap of " + std::to_string(cap));

  LabelSequence y(m, 0);
  InferenceResult best;
  best.labels = y;
  best.score = -std::numeric_limits<double>::infinity();
  // Odometer in lexicographic order; strict comparison keeps the smallest on ties.
  for (std::uint64_t n = 0; n < space; ++n) {
    const double s = scorer.score(x, y);
    if (n == 0 || s > best.score) {
      best.score = s;
      best.labels = y;
    }
    for (std::size_t j = m; j-- > 0;) {
      if (static_cast<std::size_t>(++y[j]) < k) break;
      y[j] = 0;
    }
  }
  best.iterations = static_cast<std::size_t>(space);
  return best;
}

namespace {

// Evaluates single-label edits of a current sequence, incrementally when possible.
class EditEvaluator {
 public:
  EditEvaluator(const AcousticSequence& x, const Scorer& scorer, LabelSequence labels)
      : x_(x), scorer_(scorer), feature_scorer_(dynamic_cast<const FeatureScorer*>(&scorer)),
        labels_(std::move(labels)) {
    reset_score();
  }

  const LabelSequence& labels() const noexcept { return labels_; }
  double score() const noexcept { return score_; }

  double score_edit(std::size_t j, Label label) {
    if (feature_scorer_) {
      scratch_ = feature_;
      apply_psi_delta(scratch_, x_, labels_, j, label);
      return feature_scorer_->score_feature(scratch_);
    }
    const Label old = labels_[j];
    labels_[j] = label;
    const double s = scorer_.score(x_, labels_);
    labels_[j] = old;
    return s;
  }

  // Commits the edit if its exact score beats the current one.
  bool try_commit(std::size_t j, Label label) {
    const Label old = labels_[j];
    labels_[j] = label;
    StructuredFeature next_feature;
    double next_score;
    if (feature_scorer_) {
      next_feature = psi(x_, labels_, feature_scorer_->num_labels(), feature_scorer_->order());
      next_score = feature_scorer_->score_feature(next_feature);
    } else {
      next_score = scorer_.score(x_, labels_);
    }
    if (!(next_score > score_)) {
      labels_[j] = old;
      return false;
    }
    score_ = next_score;
    feature_ = std::move(next_feature);
    return true;
  }

 private:
  void reset_score() {
    if (feature_scorer_) {
      feature_ = psi(x_, labels_, feature_scorer_->num_labels(), feature_scorer_->order());
      score_ = feature_scorer_->score_feature(feature_);
    } else {
      score_ = scorer_.score(x_, labels_);
    }
  }

  const AcousticSequence& x_;
  const Scorer& scorer_;
  const FeatureScorer* feature_scorer_;
  LabelSequence labels_;
  StructuredFeature feature_;
  StructuredFeature scratch_;
  double score_ = 0.0;
};

}  // namespace

InferenceResult coordinate_ascent(const AcousticSequence& x, const Scorer& scorer,
                                  std::span<const Label> init, std::size_t max_passes) {
  const std::size_t k = scorer.num_labels();
  validate_pair(x, init, k);
  EditEvaluator eval(x, scorer, LabelSequence(init.begin(), init.end()));

  InferenceResult result;
  result.trace.push_back(eval.score());
  std::size_t passes = 0;
  while (passes < max_passes) {
    ++passes;
    bool changed = false;
    for (std::size_t j = 0; j < x.frames(); ++j) {
      const Label current = eval.labels()[j];
      Label best_label = current;
      double best = eval.score();
      for (Label l = 0; static_cast<std::size_t>(l) < k; ++l) {
        if (l == current) continue;
        const double s = eval.score_edit(j, l);
        if (s > best) {
          best = s;
          best_label = l;
        }
      }
      if (best_label != current && eval.try_commit(j, best_label)) {
        result.trace.push_back(eval.score());
        changed = true;
      }
    }
    if (!changed) break;
  }
  result.labels = eval.labels();
  result.score = eval.score();
  result.iterations = passes;
  return result;
}

InferenceResult coordinate_ascent(const AcousticSequence& x, const Scorer& scorer,
                                  std::span<const Label> init, const CoordinateAscentOptions& options) {
  InferenceResult best = coordinate_ascent(x, scorer, init, options.max_passes);
  if (options.restarts == 0) return best;
  Rng rng(options.seed);
  std::uniform_int_distribution<Label> pick(0, static_cast<Label>(scorer.num_labels()) - 1);
  LabelSequence start(x.frames());
  for (std::size_t r = 0; r < options.restarts; ++r) {
    for (Label& l : start) l = pick(rng);
    InferenceResult run = coordinate_ascent(x, scorer, start, options.max_passes);
    if (run.score > best.score) best = std::move(run);
  }
  return best;
}

InferenceResult rescore_candidates(const AcousticSequence& x,
                                   std::span<const LabelSequence> candidates, const Scorer& scorer) {
  if (candidates.empty()) throw ShapeError("empty candidate set");
  InferenceResult best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    validate_pair(x, candidates[i], scorer.num_labels());
    const double s = scorer.score(x, candidates[i]);
    if (i == 0 || s > best.score) {
      best.score = s;
      best.labels = candidates[i];
    }
  }
  best.iterations = candidates.size();
  return best;
}

InferenceResult viterbi_linear(const AcousticSequence& x, const LinearModel& model) {
  const LinearPotentials pot = decompose_linear(model);
  if (x.dim() != model.dim) throw ShapeError("acoustic dimension does not match the model");
  const std::size_t k = pot.num_labels;
  const std::size_t m = x.frames();

  auto unary = [&](std::size_t j, std::size_t p) {
    auto row = pot.unary_row(static_cast<Label>(p));
    auto frame = x.frame(j);
    double s = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) s += row[c] * frame[c];
    return s;
  };

  std::vector<double> best(k), next(k);
  std::vector<Label> back(m * k, 0);
  for (std::size_t p = 0; p < k; ++p) best[p] = unary(0, p);
  for (std::size_t j = 1; j < m; ++j) {
    for (std::size_t p = 0; p < k; ++p) {
      std::size_t arg = 0;
      double top = best[0] + pot.pairwise[p];
      for (std::size_t q = 1; q < k; ++q) {
        const double s = best[q] + pot.pairwise[q * k + p];
        if (s > top) {
          top = s;
          arg = q;
        }
      }
      next[p] = top + unary(j, p);
      back[j * k + p] = static_cast<Label>(arg);
    }
    std::swap(best, next);
  }

  std::size_t last = 0;
  for (std::size_t p = 1; p < k; ++p) {
    if (best[p] > best[last]) last = p;
  }
  InferenceResult result;
  result.labels.assign(m, 0);
  result.labels[m - 1] = static_cast<Label>(last);
  for (std::size_t j = m - 1; j > 0; --j) {
    result.labels[j - 1] = back[j * k + static_cast<std::size_t>(result.labels[j])];
  }
  result.score = linear_score(model, psi(x, result.labels, k, FeatureOrder::First));
  result.iterations = m;
  return result;
}

}  // namespace structseq
