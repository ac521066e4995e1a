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
#include "structseq/candidates.hpp"
#include "structseq/errors.hpp"
#include "structseq/evaluation.hpp"
#include "structseq/synthdata.hpp"
#include "support/oracles.hpp"

using namespace structseq;

TEST_CASE("generate") {
  SUBCASE("noise-free frames equal the means") {
    auto spec = GeneratorSpec::benchmark(1);
    spec.emission_std = 0.0;
    spec.num_utterances = 5;
    auto data = generate(spec);
    for (const auto& u : data.utterances()) {
      for (std::size_t j = 0; j < u.x().frames(); ++j) {
        const auto p = static_cast<std::size_t>((u.reference())[j]);
        for (std::size_t c = 0; c < spec.dim; ++c) CHECK(u.x().frame(j)[c] == spec.emission_means[p * spec.dim + c]);
      }
    }
  }
  SUBCASE("identity transitions give constant utterances") {
    auto spec = GeneratorSpec::benchmark(2);
    spec.transition = GeneratorSpec::self_loop_transition(spec.num_labels, 1.0);
    spec.num_utterances = 10;
    auto data = generate(spec);
    for (const auto& u : data.utterances()) {
      const auto& t = u.reference();
      CHECK(std::all_of(t.begin(), t.end(), [&](Label l) { return l == t[0]; }));
    }
  }
  SUBCASE("same spec, same data") {
    auto spec = GeneratorSpec::benchmark(7);
    CHECK(generate(spec) == generate(spec));
    auto data = generate(spec);
    CHECK(data.size() == 250);
    CHECK(data[0].id() == "utt00000");
    for (const auto& u : data.utterances()) {
      CHECK(u.x().frames() >= 20);
      CHECK(u.x().frames() <= 40);
    }
  }
  SUBCASE("label frequencies approach the stationary distribution") {
    auto spec = GeneratorSpec::benchmark(5);
    spec.transition = {0.6, 0.3, 0.1, 0.2, 0.5, 0.3, 0.1, 0.1, 0.8};
    spec.num_labels = 3;
    spec.emission_means = GeneratorSpec::random_means(3, spec.dim, 1);
    spec.num_utterances = 400;
    spec.min_len = 200;
    spec.max_len = 200;
    auto pi = stationary_distribution(spec.transition, 3);
    std::vector<double> counts(3, 0.0);
    double n = 0;
    // Skip a burn-in so the uniform initial label has mixed out.
    auto data = generate(spec);
    for (const auto& u : data.utterances()) {
      for (std::size_t j = 50; j < u.x().frames(); ++j) counts[static_cast<std::size_t>((u.reference())[j])] += 1;
      n += static_cast<double>(u.x().frames() - 50);
    }
    // Frames are correlated; 5 sigma of an effective sample one tenth the size.
    for (std::size_t p = 0; p < 3; ++p) {
      const double sigma = std::sqrt(pi[p] * (1 - pi[p]) / (n / 10));
      CHECK(std::abs(counts[p] / n - pi[p]) < 5 * sigma);
    }
  }
  SUBCASE("invalid specs") {
    auto spec = GeneratorSpec::benchmark();
    spec.transition[0] += 0.5;
    CHECK_THROWS_AS(generate(spec), ShapeError);
    spec = GeneratorSpec::benchmark();
    spec.min_len = 50;
    CHECK_THROWS_AS(generate(spec), ShapeError);
  }
}

TEST_CASE("evaluate") {
  Vocabulary v({"A", "B", "C"});
  auto x4 = AcousticSequence(4, 1, {1, 2, 3, 4});
  auto x3 = AcousticSequence(3, 1, {1, 2, 3});
  Dataset ref(v, {Utterance("a", x4, LabelSequence{0, 1, 1, 2}), Utterance("b", x3, LabelSequence{0, 0, 1})});

  std::vector<Hypothesis> same{{"a", {0, 1, 1, 2}}, {"b", {0, 0, 1}}};
  CHECK(evaluate(same, ref, ErrorMetric::Frame) == 0.0);
  CHECK(evaluate(same, ref, ErrorMetric::Phone) == 0.0);

  Dataset one(v, {ref[0]});
  std::vector<Hypothesis> h{{"a", {0, 1, 2, 2}}};
  CHECK(evaluate(h, one, ErrorMetric::Frame) == 0.25);

  Dataset swap(v, {ref[1]});
  std::vector<Hypothesis> ba{{"b", {1, 1, 0}}};
  CHECK(evaluate(ba, swap, ErrorMetric::Phone) == 1.0);

  // Pooled, not averaged: (1 + 2) / (4 + 3) frames.
  std::vector<Hypothesis> both{{"b", {1, 1, 1}}, {"a", {0, 1, 2, 2}}};
  CHECK(evaluate(both, ref, ErrorMetric::Frame) == doctest::Approx(3.0 / 7.0));

  std::vector<Hypothesis> missing{{"a", {0, 1, 1, 2}}};
  CHECK_THROWS_AS(evaluate(missing, ref, ErrorMetric::Frame), ShapeError);
  std::vector<Hypothesis> extra{{"a", {0, 1, 1, 2}}, {"b", {0, 0, 1}}, {"c", {0}}};
  CHECK_THROWS_AS(evaluate(extra, ref, ErrorMetric::Frame), ShapeError);
}

TEST_CASE("selection_study") {
  auto spec = GeneratorSpec::benchmark(9);
  spec.num_utterances = 12;
  spec.min_len = 5;
  spec.max_len = 8;
  auto data = generate(spec);
  testing::TestRng rng(2);
  auto gen = testing::random_linear(rng, FeatureOrder::First, spec.num_labels, spec.dim);
  auto net = init_network(std::vector<std::size_t>{feature_dim(FeatureOrder::First, spec.num_labels, spec.dim), 4, 1}, 1,
                          FeatureOrder::First, spec.num_labels, spec.dim);

  SUBCASE("singleton sets make every policy agree") {
    std::vector<CandidateSet> sets;
    for (const auto& u : data.utterances()) {
      auto s = nbest_linear(u.x(), gen, 1);
      s.utt_id = u.id();
      sets.push_back(s);
    }
    auto r = selection_study(data, sets, net, 3);
    CHECK(r.oracle_min == r.oracle_max);
    CHECK(r.random == r.oracle_min);
    CHECK(r.sdnn == r.oracle_min);
    CHECK(r.gap() == 0.0);
  }
  SUBCASE("reference in the pool") {
    std::vector<CandidateSet> sets;
    for (const auto& u : data.utterances()) {
      auto s = assemble_training_set(u.x(), u.reference(), gen, 10, 4);
      s.utt_id = u.id();
      sets.push_back(s);
    }
    auto r = selection_study(data, sets, net, 3);
    CHECK(r.oracle_min == 0.0);
    CHECK(r.oracle_min <= r.sdnn);
    CHECK(r.oracle_min <= r.random);
    CHECK(r.sdnn <= r.oracle_max);
    CHECK(r.random <= r.oracle_max);
    CHECK(r.utterances.size() == data.size());
    std::ostringstream csv;
    write_selection_csv(csv, r);
    CHECK(csv.str().rfind("policy,per\noracle_min,0.000000\n", 0) == 0);
  }
}
