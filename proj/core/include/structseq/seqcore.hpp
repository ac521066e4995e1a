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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace structseq {

using Label = std::int32_t;
using LabelSequence = std::vector<Label>;

// Ordered set of label tokens; a token's index is its position.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> labels);

  // One token per line; blank trailing lines are ignored.
  static Vocabulary read(std::istream& in);
  void write(std::ostream& out) const;

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& token(Label label) const;
  std::optional<Label> find(std::string_view token) const;
  Label index_of(std::string_view token) const;
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  bool operator==(const Vocabulary& other) const { return labels_ == other.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Label> index_;
};

// M x d matrix of finite values, stored row-major.
class AcousticSequence {
 public:
  AcousticSequence() = default;
  AcousticSequence(std::size_t frames, std::size_t dim, std::vector<double> values);
  explicit AcousticSequence(const std::vector<std::vector<double>>& rows);

  std::size_t frames() const noexcept { return frames_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> frame(std::size_t j) const {
    return {values_.data() + j * dim_, dim_};
  }
  std::span<const double> values() const noexcept { return values_; }

  bool operator==(const AcousticSequence&) const = default;

 private:
  std::size_t frames_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

class Utterance {
 public:
  Utterance(std::string id, AcousticSequence x,
            std::optional<LabelSequence> reference = std::nullopt);

  const std::string& id() const noexcept { return id_; }
  const AcousticSequence& x() const noexcept { return x_; }
  std::size_t frames() const noexcept { return x_.frames(); }
  bool has_reference() const noexcept { return reference_.has_value(); }
  const LabelSequence& reference() const;
  const std::optional<LabelSequence>& maybe_reference() const noexcept { return reference_; }

  bool operator==(const Utterance&) const = default;

 private:
  std::string id_;
  AcousticSequence x_;
  std::optional<LabelSequence> reference_;
};

class Dataset {
 public:
  Dataset() = default;
  Dataset(Vocabulary vocabulary, std::vector<Utterance> utterances);

  const Vocabulary& vocabulary() const noexcept { return vocabulary_; }
  const std::vector<Utterance>& utterances() const noexcept { return utterances_; }
  std::size_t size() const noexcept { return utterances_.size(); }
  const Utterance& operator[](std::size_t i) const { return utterances_[i]; }
  // Returns nullptr when no utterance has this id.
  const Utterance* find(std::string_view id) const;

  bool operator==(const Dataset&) const = default;

 private:
  Vocabulary vocabulary_;
  std::vector<Utterance> utterances_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

// A decoded label sequence keyed by utterance id.
struct Hypothesis {
  std::string id;
  LabelSequence labels;

  bool operator==(const Hypothesis&) const = default;
};

// Throws ShapeError unless |labels| == M and every label is in [0, K).
void validate_pair(const AcousticSequence& x, std::span<const Label> labels, std::size_t num_labels);
void validate_labels(std::span<const Label> labels, std::size_t num_labels);

// Dataset text format:
//   UTT <id> <M> <d>
//   <f1> ... <fd> [<label-token>]     (M rows)
// Every row of a block carries a label or none does.
Dataset parse_dataset(std::istream& in, const Vocabulary& vocabulary);
void serialize_dataset(std::ostream& out, const Dataset& dataset);

// Hypothesis text format:
//   HYP <id> <M>
//   <label-token>                     (M rows)
std::vector<Hypothesis> parse_hypotheses(std::istream& in, const Vocabulary& vocabulary);
void serialize_hypotheses(std::ostream& out, std::span<const Hypothesis> hypotheses,
                          const Vocabulary& vocabulary);

// 17 significant digits ("%.17g"); parses back to the identical double.
std::string format_double(double value);

}  // namespace structseq
