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
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "structseq/random.hpp"
#include "structseq/scorer.hpp"
#include "structseq/seqcore.hpp"

namespace structseq {

struct Candidate {
  LabelSequence labels;
  double generator_score = 0.0;
  SequenceTag tag = SequenceTag::NBest;

  bool operator==(const Candidate&) const = default;
};

// Ordered pool of label sequences for one utterance; stands in for a lattice.
struct CandidateSet {
  std::string utt_id;
  std::vector<Candidate> items;

  std::vector<LabelSequence> sequences() const;
  // Throws ShapeError if lengths differ from `frames`, a sequence repeats, or the
  // NBest items are not in non-increasing generator-score order.
  void validate(std::size_t frames) const;

  bool operator==(const CandidateSet&) const = default;
};

std::string_view tag_name(SequenceTag tag);
SequenceTag parse_tag(std::string_view name);

// The N highest-scoring distinct sequences under a first-order linear model, best first
// (exact list Viterbi). Fewer than N when K^M < N.
CandidateSet nbest_linear(const AcousticSequence& x, const LinearModel& model, std::size_t n);

// `count` sequences drawn uniformly from the K^M space, rejecting members of `exclude` and
// earlier draws. Throws CapacityError when the space cannot supply them.
std::vector<LabelSequence> random_sequences(std::size_t frames, std::size_t num_labels,
                                            std::size_t count, Rng& rng,
                                            const std::set<LabelSequence>& exclude = {});
std::vector<LabelSequence> random_sequences(std::size_t frames, std::size_t num_labels,
                                            std::size_t count, std::uint64_t seed,
                                            const std::set<LabelSequence>& exclude = {});

// Reference t, then `nbest` items not equal to t, then `num_random` fresh random draws.
// Tag precedence on collisions: Reference > NBest > Random.
CandidateSet assemble_training_set(const AcousticSequence& x, std::span<const Label> reference,
                                   const LinearModel& model, const CandidateSet& nbest,
                                   std::size_t num_random, Rng& rng);
// Convenience form: N-best of size n plus n random draws seeded by `seed`.
CandidateSet assemble_training_set(const AcousticSequence& x, std::span<const Label> reference,
                                   const LinearModel& model, std::size_t n, std::uint64_t seed);

// Candidate file: per utterance `CAND <utt-id> <count>` then `count` lines of
// `<tag> <generator-score> <label-token> ... <label-token>`.
void write_candidates(std::ostream& out, std::span<const CandidateSet> sets, const Vocabulary& vocabulary);
std::vector<CandidateSet> read_candidates(std::istream& in, const Vocabulary& vocabulary);

}  // namespace structseq
