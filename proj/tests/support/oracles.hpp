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

// Test-only reference implementations. These are written from the definitions
// (tensor products of indicator vectors, exhaustive enumeration, finite
// differences) and deliberately share no code paths with the optimized library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "structseq/featmap.hpp"
#include "structseq/scorer.hpp"
#include "structseq/seqcore.hpp"

namespace structseq::testing {

using TestRng = std::mt19937_64;

inline AcousticSequence random_acoustic(TestRng& rng, std::size_t frames, std::size_t dim,
                                        double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(frames * dim);
  for (double& e : v) e = u(rng);
  return AcousticSequence(frames, dim, std::move(v));
}

inline LabelSequence random_labels(TestRng& rng, std::size_t frames, std::size_t num_labels) {
  std::uniform_int_distribution<Label> u(0, static_cast<Label>(num_labels) - 1);
  LabelSequence y(frames);
  for (Label& l : y) l = u(rng);
  return y;
}

inline LinearModel random_linear(TestRng& rng, FeatureOrder order, std::size_t num_labels,
                                 std::size_t dim, double scale = 1.0) {
  LinearModel m = LinearModel::zeros(order, num_labels, dim);
  std::normal_distribution<double> n(0.0, scale);
  for (double& t : m.theta) t = n(rng);
  return m;
}

inline void add_into(std::vector<double>& acc, const std::vector<double>& v) {
  if (acc.empty()) acc.assign(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) acc[i] += v[i];
}

// psi assembled literally from sums of tensor products of one-hot vectors.
// Transition layout is source-major: Lambda(next) (x) Lambda(prev).
inline std::vector<double> oracle_psi(const AcousticSequence& x, const LabelSequence& y,
                                      std::size_t k, FeatureOrder order) {
  const std::size_t m = x.frames();
  const std::size_t d = x.dim();
  std::vector<double> upper, lower;
  auto frame = [&](std::size_t j) {
    auto f = x.frame(j);
    return std::vector<double>(f.begin(), f.end());
  };
  if (order == FeatureOrder::First) {
    upper.assign(d * k, 0.0);
    lower.assign(k * k, 0.0);
    for (std::size_t j = 0; j < m; ++j) add_into(upper, tensor(frame(j), indicator(y[j], k)));
    for (std::size_t j = 0; j + 1 < m; ++j) {
      add_into(lower, tensor(indicator(y[j + 1], k), indicator(y[j], k)));
    }
  } else {
    upper.assign(d * k * k, 0.0);
    lower.assign(k * k * k, 0.0);
    for (std::size_t j = 0; j + 1 < m; ++j) {
      add_into(upper, tensor(tensor(frame(j), indicator(y[j + 1], k)), indicator(y[j], k)));
    }
    for (std::size_t j = 0; j + 2 < m; ++j) {
      add_into(lower, tensor(tensor(indicator(y[j + 2], k), indicator(y[j + 1], k)), indicator(y[j], k)));
    }
  }
  std::vector<double> out = upper;
  out.insert(out.end(), lower.begin(), lower.end());
  for (double& v : out) v /= static_cast<double>(m);
  return out;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double oracle_linear_score(const LinearModel& model, const AcousticSequence& x,
                                  const LabelSequence& y) {
  return dot(model.theta, oracle_psi(x, y, model.num_labels, model.order));
}

// Every length-m sequence over k labels, in lexicographic order (recursive).
inline void enumerate_sequences(std::size_t m, std::size_t k,
                                const std::function<void(const LabelSequence&)>& visit) {
  LabelSequence y(m);
  std::function<void(std::size_t)> rec = [&](std::size_t j) {
    if (j == m) {
      visit(y);
      return;
    }
    for (std::size_t l = 0; l < k; ++l) {
      y[j] = static_cast<Label>(l);
      rec(j + 1);
    }
  };
  rec(0);
}

struct Ranked {
  LabelSequence labels;
  double score;
};

// All sequences sorted by score (descending), ties lexicographic.
inline std::vector<Ranked> rank_all(std::size_t m, std::size_t k,
                                    const std::function<double(const LabelSequence&)>& score) {
  std::vector<Ranked> all;
  enumerate_sequences(m, k, [&](const LabelSequence& y) { all.push_back({y, score(y)}); });
  std::stable_sort(all.begin(), all.end(), [](const Ranked& a, const Ranked& b) { return a.score > b.score; });
  return all;
}

// Reference Levenshtein by full DP table.
inline std::size_t oracle_edit_distance(const LabelSequence& a, const LabelSequence& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) t[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) t[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      t[i][j] = std::min({t[i - 1][j] + 1, t[i][j - 1] + 1, t[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
    }
  }
  return t[a.size()][b.size()];
}

// Loss evaluated from the definition in extended precision, independent of the
// library's forward pass.
inline long double oracle_loss(const NetworkModel& model, std::span<const ScoredExample> batch,
                               LossForm form) {
  auto sig = [](long double z) { return 1.0L / (1.0L + std::exp(-z)); };
  long double total = 0.0L;
  for (const auto& ex : batch) {
    std::vector<long double> h(ex.feature.values.begin(), ex.feature.values.end());
    long double z = 0.0L;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      const Layer& layer = model.layers[l];
      std::vector<long double> next(layer.out);
      for (std::size_t r = 0; r < layer.out; ++r) {
        long double a = layer.bias[r];
        for (std::size_t c = 0; c < layer.in; ++c) a += static_cast<long double>(layer.w(r, c)) * h[c];
        next[r] = a;
      }
      if (l + 1 == model.layers.size()) {
        z = next[0];
      } else {
        for (auto& v : next) v = sig(v);
        h = std::move(next);
      }
    }
    const long double f = sig(z);
    const long double w = ex.weight;
    total -= w * std::log(f);
    if (form == LossForm::Bce) total -= (1.0L - w) * std::log(1.0L - f);
  }
  return total;
}

// Central finite difference of f at every parameter of `model`, in layer order
// (weights row-major, then biases).
inline std::vector<double> finite_difference(NetworkModel model,
                                             const std::function<long double(const NetworkModel&)>& f,
                                             double eps) {
  std::vector<double> out;
  for (auto& layer : model.layers) {
    for (auto* params : {&layer.weights, &layer.bias}) {
      for (double& p : *params) {
        const double saved = p;
        p = saved + eps;
        const long double up = f(model);
        p = saved - eps;
        const long double down = f(model);
        p = saved;
        // The perturbation actually applied after rounding.
        const long double h = static_cast<long double>(saved + eps) - static_cast<long double>(saved - eps);
        out.push_back(static_cast<double>((up - down) / h));
      }
    }
  }
  return out;
}

inline std::vector<double> flatten(const NetworkGradient& g) {
  std::vector<double> out;
  for (const auto& layer : g.layers) {
    out.insert(out.end(), layer.weights.begin(), layer.weights.end());
    out.insert(out.end(), layer.bias.begin(), layer.bias.end());
  }
  return out;
}

// |a - n| <= rel * max(|a|, |n|), or |a - n| <= abs_tol when the analytic value is tiny.
inline bool gradient_close(double analytic, double numeric, double rel = 1e-4, double abs_tol = 1e-8,
                           double tiny = 1e-6) {
  const double diff = std::abs(analytic - numeric);
  if (std::abs(analytic) < tiny) return diff < abs_tol;
  return diff <= rel * std::max(std::abs(analytic), std::abs(numeric));
}

}  // namespace structseq::testing
