// Copyright 2026 The lgbg Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <numeric>

#include "lgbg/synthgen.hpp"
#include "lgbg/trainer.hpp"

namespace {

struct Fixture {
  lgbg::ModelConfig config;
  lgbg::PreparedDataset data;
  lgbg::Model model;
  std::vector<std::size_t> batch;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    lgbg::ScenarioSpec spec = lgbg::builtin_scenario("combined");
    spec.subjects = 4;
    spec.days = 12;
    spec.noise = 0.1;
    const auto synth = lgbg::generate(spec);
    lgbg::ModelConfig config;
    const auto table = lgbg::EmbeddingTable::fallback(synth.data.vocab, config.gnn.node_dim, 0);
    auto data = lgbg::prepare_dataset(synth.data, table, config.gnn, 3);
    std::vector<std::size_t> batch(16);
    std::iota(batch.begin(), batch.end(), std::size_t{0});
    return Fixture{config, std::move(data), lgbg::Model::create(config, 1), batch};
  }();
  return f;
}

void BM_BatchGradientReference(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(lgbg::batch_gradient_reference(f.model, f.data, f.batch, 0.1));
}

void BM_BatchGradientSerial(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(lgbg::batch_gradient(f.model, f.data, f.batch, 0.1, false));
}

void BM_BatchGradientParallel(benchmark::State& state) {
  const auto& f = fixture();
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lgbg::batch_gradient(f.model, f.data, f.batch, 0.1, true));
  state.counters["threads"] = static_cast<double>(state.range(0));
}

}  // namespace

BENCHMARK(BM_BatchGradientReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchGradientSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchGradientParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
