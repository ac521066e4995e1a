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


#include "structseq/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <set>

#include "structseq/candidates.hpp"
#include "structseq/errors.hpp"
#include "structseq/evaluation.hpp"
#include "structseq/inference.hpp"
#include "structseq/parallel.hpp"
#include "structseq/random.hpp"

namespace structseq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream ids for derive_seed.
enum : std::uint64_t { kShuffle = 1, kUtterance = 2, kHeldout = 3, kDecode = 4 };

void require_references(std::span<const Utterance* const> utts) {
  for (const Utterance* u : utts) {
    if (!u->has_reference()) throw ShapeError("training utterance '" + u->id() + "' has no reference");
  }
}

std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(derive_seed(seed, kShuffle, epoch));
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

// Sum of pooled frame and phone errors over decoded held-out utterances.
struct HeldoutScore {
  double frame_acc = kNaN;
  double per = kNaN;
};

template <typename Decode>
HeldoutScore score_heldout(std::span<const Utterance* const> heldout, Decode decode) {
  if (heldout.empty()) return {};
  std::vector<LabelSequence> hyps(heldout.size());
  parallel_for(heldout.size(), [&](std::size_t i) { hyps[i] = decode(i); });
  ErrorCounts frame, phone;
  for (std::size_t i = 0; i < heldout.size(); ++i) {
    frame += error_counts(heldout[i]->reference(), hyps[i], ErrorMetric::Frame);
    phone += error_counts(heldout[i]->reference(), hyps[i], ErrorMetric::Phone);
  }
  return {1.0 - frame.rate(), phone.rate()};
}

// Appends (y, weight) unless y is already in the batch.
class BatchBuilder {
 public:
  BatchBuilder(const AcousticSequence& x, const LabelSequence& reference, std::size_t num_labels,
               FeatureOrder order, AccuracyVariant accuracy)
      : x_(x), reference_(reference), num_labels_(num_labels), order_(order), accuracy_(accuracy) {}

  void add(const LabelSequence& y, SequenceTag tag) {
    if (!seen_.insert(y).second) return;
    ScoredExample ex;
    ex.feature = psi(x_, y, num_labels_, order_);
    ex.weight = tag == SequenceTag::Reference ? 1.0 : label_accuracy(reference_, y, accuracy_);
    ex.tag = tag;
    batch_.push_back(std::move(ex));
  }

  const std::set<LabelSequence>& seen() const noexcept { return seen_; }
  std::vector<ScoredExample>& batch() noexcept { return batch_; }

 private:
  const AcousticSequence& x_;
  const LabelSequence& reference_;
  std::size_t num_labels_;
  FeatureOrder order_;
  AccuracyVariant accuracy_;
  std::set<LabelSequence> seen_;
  std::vector<ScoredExample> batch_;
};

double label_space(std::size_t num_labels, std::size_t frames) {
  return std::pow(static_cast<double>(num_labels), static_cast<double>(frames));
}

// Random negatives, capped by what the label space can still supply.
std::vector<LabelSequence> draw_negatives(std::size_t frames, std::size_t num_labels, std::size_t count,
                                          Rng& rng, const std::set<LabelSequence>& exclude) {
  const double room = label_space(num_labels, frames) - static_cast<double>(exclude.size());
  if (room <= 0.0) return {};
  count = std::min<std::size_t>(count, static_cast<std::size_t>(std::min(room, 1e15)));
  return random_sequences(frames, num_labels, count, rng, exclude);
}

void step(NetworkModel& model, std::vector<ScoredExample>& batch, const TrainConfig& config,
          EpochRecord& record) {
  double value = 0.0;
  NetworkGradient grad = loss_gradient(model, batch, config.loss_form, &value);
  if (!std::isfinite(value)) throw NumericError("training loss is not finite");
  apply_gradient(model, grad, config.learning_rate);
  record.loss += value;
  record.num_examples += batch.size();
  for (const auto& ex : batch) ++record.examples_by_tag[static_cast<std::size_t>(ex.tag)];
}

NetworkModel initial_network(const Dataset& data, const TrainConfig& config, std::size_t dim) {
  const auto sizes = network_sizes(config.order, data.vocabulary().size(), dim,
                                   config.hidden_layers, config.hidden);
  return init_network(sizes, config.seed, config.order, data.vocabulary().size(), dim);
}

std::size_t data_dim(std::span<const Utterance* const> utts) {
  if (utts.empty()) throw ShapeError("no training utterances");
  const std::size_t d = utts.front()->x().dim();
  for (const Utterance* u : utts) {
    if (u->x().dim() != d) throw ShapeError("utterances have different acoustic dimensions");
  }
  return d;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw ShapeError("epochs must be at least 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ShapeError("learning rate must be finite and non-negative");
  }
  if (hidden_layers > 0 && hidden == 0) throw ShapeError("hidden width must be positive");
  if (!(heldout_fraction >= 0.0 && heldout_fraction < 1.0)) {
    throw ShapeError("held-out fraction must be in [0, 1)");
  }
  if (max_passes == 0) throw ShapeError("max passes must be positive");
}

void LinearTrainConfig::validate() const {
  if (epochs < 1) throw ShapeError("epochs must be at least 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ShapeError("learning rate must be finite and non-negative");
  }
  if (!(heldout_fraction >= 0.0 && heldout_fraction < 1.0)) {
    throw ShapeError("held-out fraction must be in [0, 1)");
  }
}

void write_report_csv(std::ostream& out, const TrainReport& report) {
  out << "epoch,loss,heldout_frame_acc,heldout_per,num_examples\n";
  for (const auto& r : report.epochs) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu,%.9g,%.6f,%.6f,%zu\n", r.epoch, r.loss, r.heldout_frame_acc,
                  r.heldout_per, r.num_examples);
    out << buf;
  }
}

std::pair<std::vector<const Utterance*>, std::vector<const Utterance*>> split_heldout(
    const Dataset& data, double fraction) {
  const std::size_t n = data.size();
  std::size_t held = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
  if (n > 0 && held >= n) held = n - 1;
  std::vector<const Utterance*> train, heldout;
  for (std::size_t i = 0; i < n; ++i) (i < n - held ? train : heldout).push_back(&data[i]);
  return {std::move(train), std::move(heldout)};
}

std::vector<std::size_t> network_sizes(FeatureOrder order, std::size_t num_labels, std::size_t dim,
                                       std::size_t hidden_layers, std::size_t hidden) {
  std::vector<std::size_t> sizes{feature_dim(order, num_labels, dim)};
  for (std::size_t l = 0; l < hidden_layers; ++l) sizes.push_back(hidden);
  sizes.push_back(1);
  return sizes;
}

std::pair<LinearModel, TrainReport> train_linear(const Dataset& data, const LinearTrainConfig& config) {
  config.validate();
  auto [train, heldout] = split_heldout(data, config.heldout_fraction);
  require_references(train);
  require_references(heldout);
  const std::size_t k = data.vocabulary().size();
  const std::size_t d = data_dim(train);

  // Averaging: avg = theta - acc / c, with acc accumulating c * update.
  LinearModel model = LinearModel::zeros(FeatureOrder::First, k, d);
  std::vector<double> acc(model.theta.size(), 0.0);
  double c = 1.0;
  auto averaged = [&] {
    LinearModel avg = model;
    for (std::size_t i = 0; i < avg.theta.size(); ++i) avg.theta[i] -= acc[i] / c;
    return avg;
  };

  TrainReport report;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    EpochRecord record;
    record.epoch = epoch + 1;
    for (std::size_t idx : shuffled_order(train.size(), config.seed, epoch)) {
      const Utterance& utt = *train[idx];
      const InferenceResult decoded = viterbi_linear(utt.x(), model);
      ++record.num_examples;
      if (decoded.labels != utt.reference()) {
        const StructuredFeature gold = psi(utt.x(), utt.reference(), k, FeatureOrder::First);
        const StructuredFeature guess = psi(utt.x(), decoded.labels, k, FeatureOrder::First);
        record.loss += std::max(0.0, decoded.score - linear_score(model, gold));
        for (std::size_t i = 0; i < model.theta.size(); ++i) {
          const double delta = config.learning_rate * (gold.values[i] - guess.values[i]);
          model.theta[i] += delta;
          acc[i] += c * delta;
        }
      }
      c += 1.0;
    }
    const LinearModel avg = averaged();
    const HeldoutScore hs =
        score_heldout(heldout, [&](std::size_t i) { return viterbi_linear(heldout[i]->x(), avg).labels; });
    record.heldout_frame_acc = hs.frame_acc;
    record.heldout_per = hs.per;
    report.epochs.push_back(record);
  }
  return {averaged(), std::move(report)};
}

std::pair<NetworkModel, TrainReport> train_sdnn_without_lattice(const Dataset& data,
                                                                const TrainConfig& config) {
  config.validate();
  if (config.mode != TrainMode::WithoutLattice) throw ShapeError("config mode must be WithoutLattice");
  auto [train, heldout] = split_heldout(data, config.heldout_fraction);
  require_references(train);
  require_references(heldout);
  const std::size_t k = data.vocabulary().size();
  const std::size_t d = data_dim(train);
  NetworkModel model = initial_network(data, config, d);

  auto decode = [&](const AcousticSequence& x, std::uint64_t seed) {
    NetworkScorer scorer(model);
    Rng rng(seed);
    std::uniform_int_distribution<Label> pick(0, static_cast<Label>(k) - 1);
    LabelSequence init(x.frames());
    for (Label& l : init) l = pick(rng);
    CoordinateAscentOptions opts{config.max_passes, config.restarts, derive_seed(seed, kDecode)};
    return coordinate_ascent(x, scorer, init, opts).labels;
  };

  TrainReport report;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    EpochRecord record;
    record.epoch = epoch + 1;
    for (std::size_t idx : shuffled_order(train.size(), config.seed, epoch)) {
      const Utterance& utt = *train[idx];
      const std::uint64_t useed = derive_seed(config.seed, kUtterance, epoch * train.size() + idx);
      Rng rng(useed);
      BatchBuilder builder(utt.x(), utt.reference(), k, config.order, config.accuracy);
      builder.add(utt.reference(), SequenceTag::Reference);
      for (const auto& y : draw_negatives(utt.frames(), k, config.num_random, rng, builder.seen())) {
        builder.add(y, SequenceTag::Random);
      }
      builder.add(decode(utt.x(), useed), SequenceTag::Inferenced);
      step(model, builder.batch(), config, record);
    }
    const HeldoutScore hs = score_heldout(heldout, [&](std::size_t i) {
      return decode(heldout[i]->x(), derive_seed(config.seed, kHeldout, i));
    });
    record.heldout_frame_acc = hs.frame_acc;
    record.heldout_per = hs.per;
    report.epochs.push_back(record);
  }
  return {std::move(model), std::move(report)};
}

std::pair<NetworkModel, TrainReport> train_sdnn_with_lattice(const Dataset& data,
                                                             const LinearModel& generator,
                                                             const TrainConfig& config) {
  config.validate();
  if (config.mode != TrainMode::WithLattice) throw ShapeError("config mode must be WithLattice");
  auto [train, heldout] = split_heldout(data, config.heldout_fraction);
  require_references(train);
  require_references(heldout);
  const std::size_t k = data.vocabulary().size();
  const std::size_t d = data_dim(train);
  if (generator.num_labels != k || generator.dim != d) {
    throw ShapeError("generator model does not match the dataset's K and d");
  }
  NetworkModel model = initial_network(data, config, d);

  // N-best lists do not depend on the network, so compute them once.
  const std::size_t depth = config.random_from_nbest_pool ? 4 * config.nbest : config.nbest;
  std::vector<CandidateSet> nbest(train.size()), pool(train.size());
  parallel_for(train.size(), [&](std::size_t i) {
    if (depth == 0) return;
    CandidateSet full = nbest_linear(train[i]->x(), generator, depth);
    const std::size_t keep = std::min(config.nbest, full.items.size());
    nbest[i].items.assign(full.items.begin(), full.items.begin() + static_cast<std::ptrdiff_t>(keep));
    pool[i].items.assign(full.items.begin() + static_cast<std::ptrdiff_t>(keep), full.items.end());
  });
  std::vector<CandidateSet> heldout_candidates(heldout.size());
  parallel_for(heldout.size(), [&](std::size_t i) {
    heldout_candidates[i] = nbest_linear(heldout[i]->x(), generator, std::max<std::size_t>(config.nbest, 1));
  });

  TrainReport report;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    EpochRecord record;
    record.epoch = epoch + 1;
    for (std::size_t idx : shuffled_order(train.size(), config.seed, epoch)) {
      const Utterance& utt = *train[idx];
      Rng rng(derive_seed(config.seed, kUtterance, epoch * train.size() + idx));
      BatchBuilder builder(utt.x(), utt.reference(), k, config.order, config.accuracy);
      if (config.random_from_nbest_pool) {
        builder.add(utt.reference(), SequenceTag::Reference);
        for (const auto& item : nbest[idx].items) builder.add(item.labels, SequenceTag::NBest);
        std::vector<std::size_t> ranks(pool[idx].items.size());
        for (std::size_t r = 0; r < ranks.size(); ++r) ranks[r] = r;
        std::shuffle(ranks.begin(), ranks.end(), rng);
        ranks.resize(std::min(ranks.size(), config.num_random));
        std::sort(ranks.begin(), ranks.end());
        for (std::size_t r : ranks) builder.add(pool[idx].items[r].labels, SequenceTag::Random);
      } else {
        const double room = label_space(k, utt.frames()) - 1.0 - static_cast<double>(nbest[idx].items.size());
        const std::size_t num_random =
            room <= 0.0 ? 0 : std::min<std::size_t>(config.num_random, static_cast<std::size_t>(std::min(room, 1e15)));
        const CandidateSet set =
            assemble_training_set(utt.x(), utt.reference(), generator, nbest[idx], num_random, rng);
        for (const auto& item : set.items) builder.add(item.labels, item.tag);
      }
      step(model, builder.batch(), config, record);
    }
    NetworkScorer scorer(model);
    const HeldoutScore hs = score_heldout(heldout, [&](std::size_t i) {
      return rescore_candidates(heldout[i]->x(), heldout_candidates[i].sequences(), scorer).labels;
    });
    record.heldout_frame_acc = hs.frame_acc;
    record.heldout_per = hs.per;
    report.epochs.push_back(record);
  }
  return {std::move(model), std::move(report)};
}

}  // namespace structseq
