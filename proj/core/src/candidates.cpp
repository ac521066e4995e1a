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


#include "structseq/candidates.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_set>

#include "structseq/errors.hpp"
#include "structseq/featmap.hpp"
#include "text_util.hpp"

namespace structseq {

std::vector<LabelSequence> CandidateSet::sequences() const {
  std::vector<LabelSequence> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(item.labels);
  return out;
}

void CandidateSet::validate(std::size_t frames) const {
  std::set<LabelSequence> seen;
  const Candidate* prev_nbest = nullptr;
  for (const auto& item : items) {
    if (item.labels.size() != frames) {
      throw ShapeError("candidate for '" + utt_id + "' has length " +
                       std::to_string(item.labels.size()) + ", expected " + std::to_string(frames));
    }
    if (!seen.insert(item.labels).second) throw ShapeError("duplicate candidate in '" + utt_id + "'");
    if (item.tag == SequenceTag::NBest) {
      if (prev_nbest && item.generator_score > prev_nbest->generator_score) {
        throw ShapeError("N-best candidates of '" + utt_id + "' are not sorted by score");
      }
      prev_nbest = &item;
    }
  }
}

std::string_view tag_name(SequenceTag tag) {
  switch (tag) {
    case SequenceTag::Reference: return "reference";
    case SequenceTag::Random: return "random";
    case SequenceTag::Inferenced: return "inferenced";
    case SequenceTag::NBest: return "nbest";
  }
  return "unknown";
}

SequenceTag parse_tag(std::string_view name) {
  if (name == "reference") return SequenceTag::Reference;
  if (name == "random") return SequenceTag::Random;
  if (name == "inferenced") return SequenceTag::Inferenced;
  if (name == "nbest") return SequenceTag::NBest;
  throw FormatError("unknown candidate tag '" + std::string(name) + "'");
}

namespace {

struct Hyp {
  double score;
  Label prev;
  std::uint32_t rank;
};

// Best first; equal scores resolve by predecessor label, then by predecessor rank.
bool hyp_before(const Hyp& a, const Hyp& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.prev != b.prev) return a.prev < b.prev;
  return a.rank < b.rank;
}

void keep_top(std::vector<Hyp>& hyps, std::size_t n) {
  if (hyps.size() > n) {
    std::partial_sort(hyps.begin(), hyps.begin() + static_cast<std::ptrdiff_t>(n), hyps.end(), hyp_before);
    hyps.resize(n);
  } else {
    std::sort(hyps.begin(), hyps.end(), hyp_before);
  }
}

}  // namespace

CandidateSet nbest_linear(const AcousticSequence& x, const LinearModel& model, std::size_t n) {
  if (n == 0) throw ShapeError("N-best size must be at least 1");
  const LinearPotentials pot = decompose_linear(model);
  if (x.dim() != model.dim) throw ShapeError("acoustic dimension does not match the model");
  const std::size_t k = pot.num_labels;
  const std::size_t m = x.frames();

  // table[j * k + p]: best partial paths ending in label p at frame j, sorted best first.
  std::vector<std::vector<Hyp>> table(m * k);
  std::vector<double> unary(k);
  auto fill_unary = [&](std::size_t j) {
    auto frame = x.frame(j);
    for (std::size_t p = 0; p < k; ++p) {
      auto row = pot.unary_row(static_cast<Label>(p));
      double s = 0.0;
      for (std::size_t c = 0; c < row.size(); ++c) s += row[c] * frame[c];
      unary[p] = s;
    }
  };

  fill_unary(0);
  for (std::size_t p = 0; p < k; ++p) table[p].push_back({unary[p], -1, 0});
  std::vector<Hyp> pool;
  for (std::size_t j = 1; j < m; ++j) {
    fill_unary(j);
    for (std::size_t p = 0; p < k; ++p) {
      pool.clear();
      for (std::size_t q = 0; q < k; ++q) {
        const auto& from = table[(j - 1) * k + q];
        const double step = pot.pairwise[q * k + p] + unary[p];
        for (std::size_t r = 0; r < from.size(); ++r) {
          pool.push_back({from[r].score + step, static_cast<Label>(q), static_cast<std::uint32_t>(r)});
        }
      }
      keep_top(pool, n);
      table[j * k + p] = pool;
    }
  }

  pool.clear();
  for (std::size_t p = 0; p < k; ++p) {
    const auto& last = table[(m - 1) * k + p];
    for (std::size_t r = 0; r < last.size(); ++r) {
      pool.push_back({last[r].score, static_cast<Label>(p), static_cast<std::uint32_t>(r)});
    }
  }
  keep_top(pool, n);

  CandidateSet set;
  set.items.reserve(pool.size());
  for (const Hyp& end : pool) {
    Candidate c;
    c.labels.assign(m, 0);
    Label label = end.prev;
    std::uint32_t rank = end.rank;
    for (std::size_t j = m; j-- > 0;) {
      c.labels[j] = label;
      const Hyp& h = table[j * k + static_cast<std::size_t>(label)][rank];
      label = h.prev;
      rank = h.rank;
    }
    c.generator_score = linear_score(model, psi(x, c.labels, k, FeatureOrder::First));
    c.tag = SequenceTag::NBest;
    set.items.push_back(std::move(c));
  }
  // Recomputed scores can differ from the DP sums in the last bit.
  std::stable_sort(set.items.begin(), set.items.end(), [](const Candidate& a, const Candidate& b) {
    return a.generator_score > b.generator_score;
  });
  return set;
}

std::vector<LabelSequence> random_sequences(std::size_t frames, std::size_t num_labels,
                                            std::size_t count, Rng& rng,
                                            const std::set<LabelSequence>& exclude) {
  if (count == 0) return {};
  if (num_labels == 0 || frames == 0) throw ShapeError("random sequences need K >= 1 and M >= 1");
  // Size of the space, saturated well above anything we could need.
  const double space = std::pow(static_cast<double>(num_labels), static_cast<double>(frames));
  std::size_t excluded = 0;
  for (const auto& e : exclude) {
    if (e.size() == frames) ++excluded;
  }
  if (space < static_cast<double>(excluded + count)) {
    throw CapacityError("label space of size " + std::to_string(static_cast<std::uint64_t>(space)) +
                        " cannot supply " + std::to_string(count) + " new sequences");
  }

  std::uniform_int_distribution<Label> pick(0, static_cast<Label>(num_labels) - 1);
  std::set<LabelSequence> drawn;
  std::vector<LabelSequence> out;
  out.reserve(count);
  const std::size_t max_attempts = 100 * count;
  LabelSequence y(frames);
  for (std::size_t attempt = 0; attempt < max_attempts && out.size() < count; ++attempt) {
    for (Label& l : y) l = pick(rng);
    if (exclude.count(y) || drawn.count(y)) continue;
    drawn.insert(y);
    out.push_back(y);
  }
  if (out.size() < count) {
    throw CapacityError("could not draw " + std::to_string(count) + " distinct sequences in " +
                        std::to_string(max_attempts) + " attempts");
  }
  return out;
}

std::vector<LabelSequence> random_sequences(std::size_t frames, std::size_t num_labels,
                                            std::size_t count, std::uint64_t seed,
                                            const std::set<LabelSequence>& exclude) {
  Rng rng(seed);
  return random_sequences(frames, num_labels, count, rng, exclude);
}

CandidateSet assemble_training_set(const AcousticSequence& x, std::span<const Label> reference,
                                   const LinearModel& model, const CandidateSet& nbest,
                                   std::size_t num_random, Rng& rng) {
  validate_pair(x, reference, model.num_labels);
  auto score = [&](std::span<const Label> y) {
    return linear_score(model, psi(x, y, model.num_labels, model.order));
  };

  CandidateSet set;
  set.utt_id = nbest.utt_id;
  LabelSequence ref(reference.begin(), reference.end());
  std::set<LabelSequence> seen{ref};
  set.items.push_back({ref, score(ref), SequenceTag::Reference});
  for (const auto& item : nbest.items) {
    if (!seen.insert(item.labels).second) continue;
    set.items.push_back({item.labels, item.generator_score, SequenceTag::NBest});
  }
  for (auto& y : random_sequences(x.frames(), model.num_labels, num_random, rng, seen)) {
    const double s = score(y);
    set.items.push_back({std::move(y), s, SequenceTag::Random});
  }
  return set;
}

CandidateSet assemble_training_set(const AcousticSequence& x, std::span<const Label> reference,
                                   const LinearModel& model, std::size_t n, std::uint64_t seed) {
  CandidateSet nbest;
  if (n > 0) nbest = nbest_linear(x, model, n);
  Rng rng(seed);
  return assemble_training_set(x, reference, model, nbest, n, rng);
}

void write_candidates(std::ostream& out, std::span<const CandidateSet> sets, const Vocabulary& vocabulary) {
  for (const auto& set : sets) {
    out << "CAND " << set.utt_id << ' ' << set.items.size() << '\n';
    for (const auto& item : set.items) {
      out << tag_name(item.tag) << ' ' << format_double(item.generator_score);
      for (Label l : item.labels) out << ' ' << vocabulary.token(l);
      out << '\n';
    }
  }
}

std::vector<CandidateSet> read_candidates(std::istream& in, const Vocabulary& vocabulary) {
  detail::LineReader reader(in);
  std::vector<CandidateSet> sets;
  std::unordered_set<std::string> ids;
  std::string line;
  while (reader.next(line)) {
    const std::size_t header_line = reader.line_no();
    auto header = detail::split_ws(line);
    if (header.size() != 3 || header[0] != "CAND") {
      throw FormatError("expected 'CAND <utt-id> <count>' header", header_line);
    }
    auto count = detail::parse_size(header[2]);
    if (!count) throw FormatError("malformed candidate count", header_line);
    CandidateSet set;
    set.utt_id = std::string(header[1]);
    if (!ids.insert(set.utt_id).second) {
      throw FormatError("duplicate candidate block for '" + set.utt_id + "'", header_line);
    }
    for (std::size_t i = 0; i < *count; ++i) {
      if (!reader.next(line)) throw FormatError("candidate block '" + set.utt_id + "' is truncated", reader.line_no());
      const std::size_t row_line = reader.line_no();
      auto tokens = detail::split_ws(line);
      if (tokens.size() < 3) throw FormatError("expected '<tag> <score> <labels...>'", row_line);
      Candidate c;
      try {
        c.tag = parse_tag(tokens[0]);
      } catch (const FormatError& e) {
        throw FormatError(e.what(), row_line);
      }
      auto s = detail::parse_double(tokens[1]);
      if (!s) throw FormatError("malformed generator score", row_line);
      c.generator_score = *s;
      for (std::size_t t = 2; t < tokens.size(); ++t) {
        auto label = vocabulary.find(tokens[t]);
        if (!label) throw FormatError("unknown label token '" + std::string(tokens[t]) + "'", row_line);
        c.labels.push_back(*label);
      }
      if (!set.items.empty() && c.labels.size() != set.items.front().labels.size()) {
        throw FormatError("candidate lengths differ within '" + set.utt_id + "'", row_line);
      }
      set.items.push_back(std::move(c));
    }
    sets.push_back(std::move(set));
  }
  return sets;
}

}  // namespace structseq
