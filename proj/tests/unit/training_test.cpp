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


#include <cmath>
#include <sstream>

#include "doctest.h"
#include "structseq/errors.hpp"
#include "structseq/inference.hpp"
#include "structseq/synthdata.hpp"
#include "structseq/training.hpp"
#include "support/oracles.hpp"

using namespace structseq;
using structseq::testing::TestRng;

namespace {

// Labels planted by a unary-dominant linear model: frame j is label p's mean plus small noise.
Dataset separable(std::size_t utterances, std::uint64_t seed) {
  GeneratorSpec spec;
  spec.num_labels = 2;
  spec.dim = 2;
  spec.min_len = 4;
  spec.max_len = 8;
  spec.transition = GeneratorSpec::self_loop_transition(2, 0.7);
  spec.emission_means = {2.0, 0.0, -2.0, 0.0};
  spec.emission_std = 0.2;
  spec.num_utterances = utterances;
  spec.seed = seed;
  return generate(spec);
}

Dataset small_corpus(std::size_t utterances) {
  GeneratorSpec spec = GeneratorSpec::benchmark(3);
  spec.num_labels = 3;
  spec.dim = 2;
  spec.min_len = 4;
  spec.max_len = 7;
  spec.transition = GeneratorSpec::self_loop_transition(3, 0.7);
  spec.emission_means = GeneratorSpec::random_means(3, 2, 5);
  spec.num_utterances = utterances;
  return generate(spec);
}

TrainConfig small_config() {
  TrainConfig c;
  c.epochs = 3;
  c.hidden = 6;
  c.nbest = 5;
  c.num_random = 5;
  c.restarts = 1;
  c.heldout_fraction = 0.0;
  c.seed = 11;
  return c;
}

}  // namespace

TEST_CASE("split_heldout") {
  auto data = small_corpus(10);
  auto [train, held] = split_heldout(data, 0.25);
  CHECK(train.size() == 7);
  CHECK(held.size() == 3);
  CHECK(held.front() == &data[7]);
  auto [all, none] = split_heldout(data, 0.0);
  CHECK(all.size() == 10);
  CHECK(none.empty());
  auto [one, rest] = split_heldout(data, 1.0);
  CHECK(one.size() == 1);
}

TEST_CASE("train_linear") {
  SUBCASE("separable data reaches perfect training accuracy") {
    auto data = separable(30, 4);
    LinearTrainConfig c;
    c.epochs = 20;
    auto [model, report] = train_linear(data, c);
    std::size_t right = 0, total = 0;
    for (const auto& u : data.utterances()) {
      auto y = viterbi_linear(u.x(), model).labels;
      for (std::size_t j = 0; j < y.size(); ++j) right += y[j] == (u.reference())[j];
      total += y.size();
    }
    CHECK(right == total);
    CHECK(report.epochs.size() == 20);
  }
  SUBCASE("no mistakes leaves the model unchanged") {
    // Single-frame utterances of one label: the zero model decodes label 0 by tie-break.
    Vocabulary v({"A", "B"});
    Dataset data(v, {Utterance("a", AcousticSequence(1, 1, {1.0}), LabelSequence{0})});
    auto [model, report] = train_linear(data, LinearTrainConfig{});
    CHECK(model == LinearModel::zeros(FeatureOrder::First, 2, 1));
    CHECK(report.epochs.back().loss == 0.0);
  }
  SUBCASE("deterministic") {
    auto data = small_corpus(12);
    LinearTrainConfig c;
    c.epochs = 5;
    c.seed = 3;
    CHECK(train_linear(data, c).first == train_linear(data, c).first);
  }
  SUBCASE("unlabelled training data is rejected") {
    Vocabulary v({"A"});
    Dataset data(v, {Utterance("a", AcousticSequence(1, 1, {1.0}), std::nullopt)});
    CHECK_THROWS_AS(train_linear(data, LinearTrainConfig{}), ShapeError);
  }
}

TEST_CASE("train_sdnn_without_lattice") {
  auto data = small_corpus(6);
  SUBCASE("zero learning rate returns the initial network") {
    auto c = small_config();
    c.mode = TrainMode::WithoutLattice;
    c.epochs = 1;
    c.learning_rate = 0.0;
    auto [model, report] = train_sdnn_without_lattice(data, c);
    auto sizes = network_sizes(c.order, 3, 2, c.hidden_layers, c.hidden);
    CHECK(model == init_network(sizes, c.seed, c.order, 3, 2));
  }
  SUBCASE("epochs = 0 is rejected") {
    auto c = small_config();
    c.epochs = 0;
    CHECK_THROWS_AS(train_sdnn_without_lattice(data, c), ShapeError);
  }
  SUBCASE("single utterance, Bce, loss falls") {
    Dataset one(data.vocabulary(), {data[0]});
    auto c = small_config();
    c.mode = TrainMode::WithoutLattice;
    c.epochs = 50;
    c.learning_rate = 0.5;
    auto report = train_sdnn_without_lattice(one, c).second;
    CHECK(report.epochs.back().loss < report.epochs.front().loss);
  }
  SUBCASE("reproducible reports") {
    auto c = small_config();
    c.mode = TrainMode::WithoutLattice;
    c.heldout_fraction = 0.34;
    auto a = train_sdnn_without_lattice(data, c);
    auto b = train_sdnn_without_lattice(data, c);
    CHECK(a.first == b.first);
    std::ostringstream ra, rb;
    write_report_csv(ra, a.second);
    write_report_csv(rb, b.second);
    CHECK(ra.str() == rb.str());
    CHECK(ra.str().rfind("epoch,loss,heldout_frame_acc,heldout_per,num_examples\n", 0) == 0);
  }
}

TEST_CASE("train_sdnn_with_lattice") {
  auto data = small_corpus(8);
  LinearTrainConfig lc;
  lc.epochs = 3;
  auto generator = train_linear(data, lc).first;

  SUBCASE("degenerate configuration sees only references") {
    auto c = small_config();
    c.nbest = 0;
    c.num_random = 0;
    c.loss_form = LossForm::Paper;
    auto [model, report] = train_sdnn_with_lattice(data, generator, c);
    for (const auto& e : report.epochs) {
      CHECK(e.num_examples == data.size());
      CHECK(e.examples_by_tag[static_cast<std::size_t>(SequenceTag::Reference)] == data.size());
    }
  }
  SUBCASE("counts by tag") {
    auto c = small_config();
    auto report = train_sdnn_with_lattice(data, generator, c).second;
    const auto& e = report.epochs.front();
    CHECK(e.examples_by_tag[static_cast<std::size_t>(SequenceTag::Random)] == 5 * data.size());
    CHECK(e.num_examples <= 11 * data.size());
  }
  SUBCASE("reproducible models") {
    auto c = small_config();
    c.random_from_nbest_pool = true;
    CHECK(train_sdnn_with_lattice(data, generator, c).first ==
          train_sdnn_with_lattice(data, generator, c).first);
  }
  SUBCASE("generator shape must match") {
    auto c = small_config();
    CHECK_THROWS_AS(train_sdnn_with_lattice(data, LinearModel::zeros(FeatureOrder::First, 4, 2), c), ShapeError);
  }
  SUBCASE("zero learning rate") {
    auto c = small_config();
    c.learning_rate = 0.0;
    auto sizes = network_sizes(c.order, 3, 2, c.hidden_layers, c.hidden);
    CHECK(train_sdnn_with_lattice(data, generator, c).first == init_network(sizes, c.seed, c.order, 3, 2));
  }
}
