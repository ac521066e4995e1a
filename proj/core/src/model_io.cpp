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


#include "structseq/model_io.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "structseq/errors.hpp"
#include "text_util.hpp"

namespace structseq {

namespace {

const char* order_token(FeatureOrder order) { return order == FeatureOrder::First ? "1" : "2"; }

FeatureOrder parse_order(std::string_view token, std::size_t line) {
  if (token == "1") return FeatureOrder::First;
  if (token == "2") return FeatureOrder::Second;
  throw FormatError("feature order must be 1 or 2, got '" + std::string(token) + "'", line);
}

std::size_t parse_count(std::string_view token, std::size_t line) {
  auto v = detail::parse_size(token);
  if (!v) throw FormatError("expected a non-negative integer, got '" + std::string(token) + "'", line);
  return *v;
}

class ValueReader {
 public:
  explicit ValueReader(detail::LineReader& reader) : reader_(reader) {}

  double next() {
    std::string line;
    if (!reader_.next(line)) throw FormatError("model file ends early", reader_.line_no());
    auto tokens = detail::split_ws(line);
    if (tokens.size() != 1) throw FormatError("expected one value per line", reader_.line_no());
    auto v = detail::parse_double(tokens[0]);
    if (!v) throw FormatError("cannot parse '" + std::string(tokens[0]) + "' as a number", reader_.line_no());
    if (!std::isfinite(*v)) throw NumericError("model file holds a non-finite value at line " +
                                               std::to_string(reader_.line_no()));
    return *v;
  }

  void expect_end() {
    std::string line;
    if (reader_.next(line)) throw FormatError("trailing data after model", reader_.line_no());
  }

 private:
  detail::LineReader& reader_;
};

LinearModel read_linear_body(detail::LineReader& reader, const std::vector<std::string_view>& h) {
  const std::size_t line = reader.line_no();
  if (h.size() != 5) throw FormatError("expected 'LINEAR <order> <K> <d> <dim>'", line);
  LinearModel model;
  model.order = parse_order(h[1], line);
  model.num_labels = parse_count(h[2], line);
  model.dim = parse_count(h[3], line);
  const std::size_t n = parse_count(h[4], line);
  if (model.num_labels == 0 || model.dim == 0) throw FormatError("K and d must be positive", line);
  if (n != feature_dim(model.order, model.num_labels, model.dim)) {
    throw FormatError("declared dimension does not match K and d", line);
  }
  ValueReader values(reader);
  model.theta.resize(n);
  for (double& v : model.theta) v = values.next();
  values.expect_end();
  return model;
}

NetworkModel read_network_body(detail::LineReader& reader, const std::vector<std::string_view>& h) {
  const std::size_t line = reader.line_no();
  if (h.size() < 5) throw FormatError("expected 'SDNN <order> <K> <d> <L+1> <sizes...>'", line);
  NetworkModel model;
  model.order = parse_order(h[1], line);
  model.num_labels = parse_count(h[2], line);
  model.dim = parse_count(h[3], line);
  const std::size_t num_layers = parse_count(h[4], line);
  if (num_layers == 0) throw FormatError("network needs at least one layer", line);
  if (h.size() != 5 + num_layers + 1) throw FormatError("layer size count does not match L+1", line);
  std::vector<std::size_t> sizes;
  for (std::size_t i = 5; i < h.size(); ++i) {
    sizes.push_back(parse_count(h[i], line));
    if (sizes.back() == 0) throw FormatError("layer size must be positive", line);
  }
  if (sizes.back() != 1) throw FormatError("network output size must be 1", line);
  if (model.num_labels == 0 || model.dim == 0) throw FormatError("K and d must be positive", line);
  if (sizes.front() != feature_dim(model.order, model.num_labels, model.dim)) {
    throw FormatError("network input size does not match K and d", line);
  }
  ValueReader values(reader);
  for (std::size_t l = 0; l < num_layers; ++l) {
    Layer layer;
    layer.in = sizes[l];
    layer.out = sizes[l + 1];
    layer.weights.resize(layer.in * layer.out);
    for (double& w : layer.weights) w = values.next();
    layer.bias.resize(layer.out);
    for (double& b : layer.bias) b = values.next();
    model.layers.push_back(std::move(layer));
  }
  values.expect_end();
  model.validate();
  return model;
}

std::vector<std::string_view> read_header(detail::LineReader& reader, std::string& storage) {
  if (!reader.next(storage)) throw FormatError("empty model file");
  return detail::split_ws(storage);
}

}  // namespace

void write_linear_model(std::ostream& out, const LinearModel& model) {
  model.validate();
  out << "LINEAR " << order_token(model.order) << ' ' << model.num_labels << ' ' << model.dim
      << ' ' << model.theta.size() << '\n';
  for (double v : model.theta) out << format_double(v) << '\n';
}

void write_network_model(std::ostream& out, const NetworkModel& model) {
  model.validate();
  out << "SDNN " << order_token(model.order) << ' ' << model.num_labels << ' ' << model.dim << ' '
      << model.layers.size();
  for (std::size_t s : model.layer_sizes()) out << ' ' << s;
  out << '\n';
  for (const auto& layer : model.layers) {
    for (double w : layer.weights) out << format_double(w) << '\n';
    for (double b : layer.bias) out << format_double(b) << '\n';
  }
}

LinearModel read_linear_model(std::istream& in) {
  detail::LineReader reader(in);
  std::string header;
  auto h = read_header(reader, header);
  if (h.empty() || h[0] != "LINEAR") throw FormatError("not a LINEAR model file", reader.line_no());
  return read_linear_body(reader, h);
}

NetworkModel read_network_model(std::istream& in) {
  detail::LineReader reader(in);
  std::string header;
  auto h = read_header(reader, header);
  if (h.empty() || h[0] != "SDNN") throw FormatError("not an SDNN model file", reader.line_no());
  return read_network_body(reader, h);
}

AnyModel read_model(std::istream& in) {
  detail::LineReader reader(in);
  std::string header;
  auto h = read_header(reader, header);
  if (!h.empty() && h[0] == "LINEAR") return read_linear_body(reader, h);
  if (!h.empty() && h[0] == "SDNN") return read_network_body(reader, h);
  throw FormatError("unknown model type; expected LINEAR or SDNN", reader.line_no());
}

}  // namespace structseq
