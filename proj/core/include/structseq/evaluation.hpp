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
#include <span>
#include <string>
#include <vector>

#include "structseq/candidates.hpp"
#include "structseq/scorer.hpp"
#include "structseq/seqcore.hpp"

namespace structseq {

enum class ErrorMetric { Frame, Phone };

// Error numerator and denominator of one utterance, summed across a corpus before dividing.
struct ErrorCounts {
  std::size_t errors = 0;
  std::size_t total = 0;

  ErrorCounts& operator+=(const ErrorCounts& o) {
    errors += o.errors;
    total += o.total;
    return *this;
  }
  double rate() const noexcept;
};

// Frame: mismatched frames / frames. Phone: edit distance of collapsed sequences /
// collapsed reference length.
ErrorCounts error_counts(std::span<const Label> reference, std::span<const Label> hypothesis,
                         ErrorMetric metric);

// Corpus-pooled error rate of `hypotheses` against the references of `reference`; every
// reference utterance needs exactly one hypothesis with the same id. Phone rates are
// not clamped and may exceed 1.
double evaluate(std::span<const Hypothesis> hypotheses, const Dataset& reference, ErrorMetric metric);

struct UtteranceSelection {
  std::string id;
  std::size_t reference_length = 0;  // collapsed
  std::size_t oracle_min = 0;        // edit distances of each policy's pick
  std::size_t oracle_max = 0;
  std::size_t random = 0;
  std::size_t sdnn = 0;
};

struct SelectionReport {
  double oracle_min = 0.0;
  double oracle_max = 0.0;
  double random = 0.0;
  double sdnn = 0.0;
  std::vector<UtteranceSelection> utterances;

  double gap() const noexcept { return random - sdnn; }
};

// Picks one candidate per utterance four ways (closest to the reference, farthest, uniform
// random under `seed`, best network score) and pools each policy's phone error rate.
SelectionReport selection_study(const Dataset& data, std::span<const CandidateSet> candidates,
                                const NetworkModel& model, std::uint64_t seed);

// policy,per rows: oracle_min, oracle_max, random, sdnn, rand-sdnn.
void write_selection_csv(std::ostream& out, const SelectionReport& report);

}  // namespace structseq
