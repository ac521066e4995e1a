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


#include "structseq/evaluation.hpp"

#include <cstdio>
#include <limits>
#include <ostream>
#include <unordered_map>

#include "structseq/errors.hpp"
#include "structseq/inference.hpp"
#include "structseq/random.hpp"

namespace structseq {

double ErrorCounts::rate() const noexcept {
  if (total == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(errors) / static_cast<double>(total);
}

ErrorCounts error_counts(std::span<const Label> reference, std::span<const Label> hypothesis,
                         ErrorMetric metric) {
  if (metric == ErrorMetric::Frame) {
    if (reference.size() != hypothesis.size()) {
      throw ShapeError("frame error needs equal lengths (" + std::to_string(reference.size()) +
                       " vs " + std::to_string(hypothesis.size()) + ")");
    }
    ErrorCounts c{0, reference.size()};
    for (std::size_t j = 0; j < reference.size(); ++j) c.errors += reference[j] != hypothesis[j];
    return c;
  }
  const LabelSequence t = collapse(reference);
  const LabelSequence y = collapse(hypothesis);
  return {edit_distance(t, y), t.size()};
}

double evaluate(std::span<const Hypothesis> hypotheses, const Dataset& reference, ErrorMetric metric) {
  std::unordered_map<std::string, const Hypothesis*> by_id;
  for (const auto& h : hypotheses) {
    if (!by_id.emplace(h.id, &h).second) throw ShapeError("duplicate hypothesis id '" + h.id + "'");
    if (!reference.find(h.id)) throw ShapeError("hypothesis '" + h.id + "' has no reference utterance");
  }
  ErrorCounts pooled;
  for (const auto& utt : reference.utterances()) {
    auto it = by_id.find(utt.id());
    if (it == by_id.end()) throw ShapeError("no hypothesis for utterance '" + utt.id() + "'");
    pooled += error_counts(utt.reference(), it->second->labels, metric);
  }
  if (pooled.total == 0) return 0.0;
  return pooled.rate();
}

SelectionReport selection_study(const Dataset& data, std::span<const CandidateSet> candidates,
                                const NetworkModel& model, std::uint64_t seed) {
  std::unordered_map<std::string, const CandidateSet*> by_id;
  for (const auto& set : candidates) by_id.emplace(set.utt_id, &set);
  NetworkScorer scorer(model);
  Rng rng(seed);

  SelectionReport report;
  ErrorCounts min_total, max_total, random_total, sdnn_total;
  for (const auto& utt : data.utterances()) {
    auto it = by_id.find(utt.id());
    if (it == by_id.end()) throw ShapeError("no candidates for utterance '" + utt.id() + "'");
    const CandidateSet& set = *it->second;
    if (set.items.empty()) throw ShapeError("empty candidate set for '" + utt.id() + "'");
    const auto& ref = utt.reference();

    std::vector<ErrorCounts> counts;
    counts.reserve(set.items.size());
    for (const auto& item : set.items) {
      validate_pair(utt.x(), item.labels, data.vocabulary().size());
      counts.push_back(error_counts(ref, item.labels, ErrorMetric::Phone));
    }
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 1; i < counts.size(); ++i) {
      if (counts[i].errors < counts[lo].errors) lo = i;
      if (counts[i].errors > counts[hi].errors) hi = i;
    }
    std::uniform_int_distribution<std::size_t> pick(0, set.items.size() - 1);
    const std::size_t rnd = pick(rng);
    const auto sequences = set.sequences();
    const LabelSequence best = rescore_candidates(utt.x(), sequences, scorer).labels;
    const ErrorCounts sdnn = error_counts(ref, best, ErrorMetric::Phone);

    min_total += counts[lo];
    max_total += counts[hi];
    random_total += counts[rnd];
    sdnn_total += sdnn;
    report.utterances.push_back(UtteranceSelection{utt.id(), counts[lo].total, counts[lo].errors,
                                                   counts[hi].errors, counts[rnd].errors, sdnn.errors});
  }
  report.oracle_min = min_total.rate();
  report.oracle_max = max_total.rate();
  report.random = random_total.rate();
  report.sdnn = sdnn_total.rate();
  return report;
}

void write_selection_csv(std::ostream& out, const SelectionReport& report) {
  auto row = [&](const char* policy, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s,%.6f\n", policy, value);
    out << buf;
  };
  out << "policy,per\n";
  row("oracle_min", report.oracle_min);
  row("oracle_max", report.oracle_max);
  row("random", report.random);
  row("sdnn", report.sdnn);
  row("rand-sdnn", report.gap());
}

}  // namespace structseq
