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


#include <benchmark/benchmark.h>

#include <random>

#include "structseq/candidates.hpp"
#include "structseq/featmap.hpp"
#include "structseq/inference.hpp"
#include "structseq/scorer.hpp"

using namespace structseq;

namespace {

constexpr std::size_t kLabels = 5;
constexpr std::size_t kDim = 8;

AcousticSequence make_x(std::size_t frames, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(frames * kDim);
  for (double& e : v) e = n(rng);
  return AcousticSequence(frames, kDim, std::move(v));
}

LabelSequence make_y(std::size_t frames, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Label> u(0, kLabels - 1);
  LabelSequence y(frames);
  for (Label& l : y) l = u(rng);
  return y;
}

LinearModel make_linear(std::uint64_t seed) {
  auto m = LinearModel::zeros(FeatureOrder::First, kLabels, kDim);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  for (double& t : m.theta) t = n(rng);
  return m;
}

FeatureOrder order_arg(const benchmark::State& state) {
  return state.range(1) == 2 ? FeatureOrder::Second : FeatureOrder::First;
}

void BM_Psi(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  auto x = make_x(m, 1);
  auto y = make_y(m, 2);
  for (auto _ : state) benchmark::DoNotOptimize(psi(x, y, kLabels, order_arg(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m));
}
BENCHMARK(BM_Psi)->ArgsProduct({{30, 300}, {1, 2}});

void BM_ApplyPsiDelta(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  auto x = make_x(m, 1);
  auto y = make_y(m, 2);
  auto f = psi(x, y, kLabels, order_arg(state));
  std::size_t j = 0;
  for (auto _ : state) {
    const Label next = static_cast<Label>((y[j] + 1) % kLabels);
    apply_psi_delta(f, x, y, j, next);
    y[j] = next;
    j = (j + 7) % m;
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_ApplyPsiDelta)->ArgsProduct({{30, 300}, {1, 2}});

void BM_Forward(benchmark::State& state) {
  const auto hidden = static_cast<std::size_t>(state.range(0));
  std::vector<std::size_t> sizes{feature_dim(FeatureOrder::First, kLabels, kDim), hidden, 1};
  auto model = init_network(sizes, 3, FeatureOrder::First, kLabels, kDim);
  auto f = psi(make_x(30, 1), make_y(30, 2), kLabels, FeatureOrder::First);
  for (auto _ : state) benchmark::DoNotOptimize(forward(model, f));
}
BENCHMARK(BM_Forward)->Arg(16)->Arg(64)->Arg(256);

void BM_Viterbi(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  auto x = make_x(m, 1);
  auto model = make_linear(4);
  for (auto _ : state) benchmark::DoNotOptimize(viterbi_linear(x, model));
}
BENCHMARK(BM_Viterbi)->Arg(30)->Arg(300);

void BM_NBest(benchmark::State& state) {
  auto x = make_x(30, 1);
  auto model = make_linear(4);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nbest_linear(x, model, n));
}
BENCHMARK(BM_NBest)->Arg(1)->Arg(10)->Arg(50);

void BM_CoordinateAscent(benchmark::State& state) {
  auto x = make_x(30, 1);
  std::vector<std::size_t> sizes{feature_dim(FeatureOrder::First, kLabels, kDim), 64, 1};
  auto model = init_network(sizes, 3, FeatureOrder::First, kLabels, kDim);
  NetworkScorer scorer(model);
  auto init = make_y(30, 5);
  CoordinateAscentOptions opts;
  opts.restarts = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(coordinate_ascent(x, scorer, init, opts));
}
BENCHMARK(BM_CoordinateAscent)->Arg(0)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
