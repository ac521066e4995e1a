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


#include "structseq/seqcore.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "structseq/errors.hpp"
#include "text_util.hpp"

namespace structseq {

namespace {

bool valid_token(std::string_view token) {
  if (token.empty()) return false;
  for (char c : token) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') return false;
  }
  return true;
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw ShapeError("vocabulary must contain at least one label");
  index_.reserve(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!valid_token(labels_[i])) {
      throw ShapeError("invalid vocabulary token at index " + std::to_string(i));
    }
    if (!index_.emplace(labels_[i], static_cast<Label>(i)).second) {
      throw ShapeError("duplicate vocabulary token '" + labels_[i] + "'");
    }
  }
}

Vocabulary Vocabulary::read(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!valid_token(lines[i])) throw FormatError("invalid vocabulary token", i + 1);
  }
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!seen.insert(lines[i]).second) {
      throw FormatError("duplicate vocabulary token '" + lines[i] + "'", i + 1);
    }
  }
  if (lines.empty()) throw FormatError("empty vocabulary");
  return Vocabulary(std::move(lines));
}

void Vocabulary::write(std::ostream& out) const {
  for (const auto& label : labels_) out << label << '\n';
}

const std::string& Vocabulary::token(Label label) const {
  if (label < 0 || static_cast<std::size_t>(label) >= labels_.size()) {
    throw ShapeError("label index " + std::to_string(label) + " out of range");
  }
  return labels_[static_cast<std::size_t>(label)];
}

std::optional<Label> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Label Vocabulary::index_of(std::string_view token) const {
  if (auto label = find(token)) return *label;
  throw ShapeError("unknown label token '" + std::string(token) + "'");
}

AcousticSequence::AcousticSequence(std::size_t frames, std::size_t dim, std::vector<double> values)
    : frames_(frames), dim_(dim), values_(std::move(values)) {
  if (frames_ == 0) throw ShapeError("acoustic sequence must have at least one frame");
  if (dim_ == 0) throw ShapeError("acoustic dimension must be at least 1");
  if (values_.size() != frames_ * dim_) {
    throw ShapeError("acoustic sequence holds " + std::to_string(values_.size()) +
                     " values, expected " + std::to_string(frames_ * dim_));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ShapeError("acoustic sequence contains a non-finite value");
  }
}

AcousticSequence::AcousticSequence(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ShapeError("acoustic sequence must have at least one frame");
  std::vector<double> flat;
  flat.reserve(rows.size() * rows.front().size());
  for (const auto& row : rows) {
    if (row.size() != rows.front().size()) throw ShapeError("ragged acoustic rows");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  *this = AcousticSequence(rows.size(), rows.front().size(), std::move(flat));
}

Utterance::Utterance(std::string id, AcousticSequence x, std::optional<LabelSequence> reference)
    : id_(std::move(id)), x_(std::move(x)), reference_(std::move(reference)) {
  if (!valid_token(id_)) throw ShapeError("utterance id must be a non-empty token");
  if (x_.frames() == 0) throw ShapeError("utterance '" + id_ + "' has no frames");
  if (reference_ && reference_->size() != x_.frames()) {
    throw ShapeError("utterance '" + id_ + "': reference has " +
                     std::to_string(reference_->size()) + " labels for " +
                     std::to_string(x_.frames()) + " frames");
  }
}

const LabelSequence& Utterance::reference() const {
  if (!reference_) throw ShapeError("utterance '" + id_ + "' has no reference labels");
  return *reference_;
}

Dataset::Dataset(Vocabulary vocabulary, std::vector<Utterance> utterances)
    : vocabulary_(std::move(vocabulary)), utterances_(std::move(utterances)) {
  by_id_.reserve(utterances_.size());
  for (std::size_t i = 0; i < utterances_.size(); ++i) {
    const auto& utt = utterances_[i];
    if (!by_id_.emplace(utt.id(), i).second) {
      throw ShapeError("duplicate utterance id '" + utt.id() + "'");
    }
    if (utt.has_reference()) validate_labels(utt.reference(), vocabulary_.size());
  }
}

const Utterance* Dataset::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &utterances_[it->second];
}

void validate_labels(std::span<const Label> labels, std::size_t num_labels) {
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (labels[j] < 0 || static_cast<std::size_t>(labels[j]) >= num_labels) {
      throw ShapeError("label " + std::to_string(labels[j]) + " at position " +
                       std::to_string(j) + " is outside [0, " + std::to_string(num_labels) + ")");
    }
  }
}

void validate_pair(const AcousticSequence& x, std::span<const Label> labels, std::size_t num_labels) {
  if (labels.size() != x.frames()) {
    throw ShapeError("label sequence has length " + std::to_string(labels.size()) +
                     " but acoustic sequence has " + std::to_string(x.frames()) + " frames");
  }
  validate_labels(labels, num_labels);
}

std::string format_double(double value) {
  char buf[32];
  int n = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(n));
}

Dataset parse_dataset(std::istream& in, const Vocabulary& vocabulary) {
  detail::LineReader reader(in);
  std::vector<Utterance> utterances;
  std::unordered_set<std::string> ids;
  std::string line;

  while (reader.next(line)) {
    const std::size_t header_line = reader.line_no();
    auto header = detail::split_ws(line);
    if (header.size() != 4 || header[0] != "UTT") {
      throw FormatError("expected 'UTT <id> <M> <d>' header", header_line);
    }
    std::string id(header[1]);
    auto frames = detail::parse_size(header[2]);
    auto dim = detail::parse_size(header[3]);
    if (!frames || !dim) throw FormatError("malformed frame count or dimension", header_line);
    if (*frames == 0) throw FormatError("utterance '" + id + "' has zero frames", header_line);
    if (*dim == 0) throw FormatError("utterance '" + id + "' has zero dimension", header_line);
    if (!ids.insert(id).second) throw FormatError("duplicate utterance id '" + id + "'", header_line);

    std::vector<double> values;
    values.reserve(*frames * *dim);
    LabelSequence labels;
    std::optional<bool> labelled;

    for (std::size_t j = 0; j < *frames; ++j) {
      if (!reader.next(line)) {
        throw FormatError("utterance '" + id + "' ends after " + std::to_string(j) + " of " +
                              std::to_string(*frames) + " rows",
                          reader.line_no());
      }
      const std::size_t row_line = reader.line_no();
      auto tokens = detail::split_ws(line);
      if (!tokens.empty() && tokens[0] == "UTT") {
        throw FormatError("utterance '" + id + "' has only " + std::to_string(j) + " of " +
                              std::to_string(*frames) + " rows",
                          row_line);
      }
      bool has_label;
      if (tokens.size() == *dim) {
        has_label = false;
      } else if (tokens.size() == *dim + 1) {
        // A trailing number that is not a vocabulary token means one float too many.
        if (!vocabulary.find(tokens.back()) && detail::parse_double(tokens.back())) {
          throw FormatError("row has " + std::to_string(tokens.size()) +
                                " values, expected " + std::to_string(*dim) + " plus a label",
                            row_line);
        }
        has_label = true;
      } else {
        throw FormatError("row has " + std::to_string(tokens.size()) + " fields, expected " +
                              std::to_string(*dim) + " values plus a label",
                          row_line);
      }
      if (labelled && *labelled != has_label) {
        throw FormatError("rows of one utterance must all carry labels or none", row_line);
      }
      labelled = has_label;

      for (std::size_t k = 0; k < *dim; ++k) {
        auto v = detail::parse_double(tokens[k]);
        if (!v) throw FormatError("cannot parse '" + std::string(tokens[k]) + "' as a number", row_line);
        if (!std::isfinite(*v)) throw FormatError("non-finite acoustic value", row_line);
        values.push_back(*v);
      }
      if (has_label) {
        auto label = vocabulary.find(tokens.back());
        if (!label) {
          throw FormatError("unknown label token '" + std::string(tokens.back()) + "'", row_line);
        }
        labels.push_back(*label);
      }
    }

    std::optional<LabelSequence> reference;
    if (labelled.value_or(false)) reference = std::move(labels);
    utterances.emplace_back(std::move(id), AcousticSequence(*frames, *dim, std::move(values)),
                            std::move(reference));
  }
  return Dataset(vocabulary, std::move(utterances));
}

void serialize_dataset(std::ostream& out, const Dataset& dataset) {
  const auto& vocab = dataset.vocabulary();
  for (const auto& utt : dataset.utterances()) {
    const auto& x = utt.x();
    out << "UTT " << utt.id() << ' ' << x.frames() << ' ' << x.dim() << '\n';
    for (std::size_t j = 0; j < x.frames(); ++j) {
      auto row = x.frame(j);
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (k > 0) out << ' ';
        out << format_double(row[k]);
      }
      if (utt.has_reference()) out << ' ' << vocab.token(utt.reference()[j]);
      out << '\n';
    }
  }
}

std::vector<Hypothesis> parse_hypotheses(std::istream& in, const Vocabulary& vocabulary) {
  detail::LineReader reader(in);
  std::vector<Hypothesis> hyps;
  std::unordered_set<std::string> ids;
  std::string line;
  while (reader.next(line)) {
    const std::size_t header_line = reader.line_no();
    auto header = detail::split_ws(line);
    if (header.size() != 3 || header[0] != "HYP") {
      throw FormatError("expected 'HYP <id> <M>' header", header_line);
    }
    auto frames = detail::parse_size(header[2]);
    if (!frames || *frames == 0) throw FormatError("malformed label count", header_line);
    Hypothesis hyp{std::string(header[1]), {}};
    if (!ids.insert(hyp.id).second) {
      throw FormatError("duplicate hypothesis id '" + hyp.id + "'", header_line);
    }
    hyp.labels.reserve(*frames);
    for (std::size_t j = 0; j < *frames; ++j) {
      if (!reader.next(line)) throw FormatError("hypothesis '" + hyp.id + "' is truncated", reader.line_no());
      auto tokens = detail::split_ws(line);
      if (tokens.size() != 1) throw FormatError("expected a single label token", reader.line_no());
      auto label = vocabulary.find(tokens[0]);
      if (!label) {
        throw FormatError("unknown label token '" + std::string(tokens[0]) + "'", reader.line_no());
      }
      hyp.labels.push_back(*label);
    }
    hyps.push_back(std::move(hyp));
  }
  return hyps;
}

void serialize_hypotheses(std::ostream& out, std::span<const Hypothesis> hypotheses,
                          const Vocabulary& vocabulary) {
  for (const auto& hyp : hypotheses) {
    out << "HYP " << hyp.id << ' ' << hyp.labels.size() << '\n';
    for (Label label : hyp.labels) out << vocabulary.token(label) << '\n';
  }
}

}  // namespace structseq
