// Copyright 2026 The proxycal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "proxycal/drift.hpp"
#include "proxycal/proxy.hpp"
#include "proxycal/sim.hpp"
#include "proxycal/stats.hpp"

namespace {

using namespace proxycal;

std::vector<double> draws(std::uint64_t seed, std::size_t n, double mean) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(mean, 5.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

void BM_KsAsymptotic(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = draws(1, n, 20.0);
  const auto b = draws(2, n, 21.0);
  for (auto _ : state) benchmark::DoNotOptimize(stats::ks_two_sample(a, b));
}
BENCHMARK(BM_KsAsymptotic)->Arg(72)->Arg(500)->Arg(5000);

void BM_KsExact(benchmark::State& state) {
  const auto a = draws(3, 10, 20.0);
  const auto b = draws(4, 10, 22.0);
  for (auto _ : state) benchmark::DoNotOptimize(stats::ks_two_sample(a, b));
}
BENCHMARK(BM_KsExact);

void BM_KlDivergence(benchmark::State& state) {
  const auto p = stats::build_histogram(draws(5, 5000, 20.0), 1.0, 0.0);
  const auto q = stats::build_histogram(draws(6, 5000, 24.0), 1.0, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(stats::kl_divergence(p, q));
}
BENCHMARK(BM_KlDivergence);

void BM_RunFramework(benchmark::State& state) {
  const auto data = sim::generate(sim::same_group_pair(7, state.range(0))).dataset;
  const auto& a = data.series.at("A");
  const auto& b = data.series.at("B");
  for (auto _ : state) benchmark::DoNotOptimize(drift::run_framework(a, b, {}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunFramework)->Arg(1000)->Arg(5088)->Unit(benchmark::kMillisecond);

void BM_SelectMinKl(benchmark::State& state) {
  const auto data = sim::generate(sim::default_network(8)).dataset;
  for (auto _ : state) benchmark::DoNotOptimize(proxy::select_min_kl(data));
}
BENCHMARK(BM_SelectMinKl)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
