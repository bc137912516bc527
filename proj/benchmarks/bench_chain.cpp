// Copyright 2026 The weakbell Authors
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

#include <benchmark/benchmark.h>

#include <vector>

#include "weakbell/bell.hpp"
#include "weakbell/protocol.hpp"

namespace {

using namespace weakbell;

BellChainConfig chain_of(std::size_t bobs) {
    const Settings t = tsirelson_settings();
    std::vector<BobStage> stages;
    for (std::size_t k = 0; k + 1 < bobs; ++k) {
        stages.push_back(BobStage::with_strength(
            t.bob, MeasurementStrength::optimal_from_precision(0.5)));
    }
    stages.push_back(BobStage::with_strength(t.bob, MeasurementStrength::strong()));
    return make_chain(t.alice, std::move(stages));
}

void BM_ChainChshLastBob(benchmark::State &state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const BellChainConfig cfg = chain_of(n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(chain_chsh(cfg, n));
    }
}
BENCHMARK(BM_ChainChshLastBob)->Arg(2)->Arg(8)->Arg(32);

void BM_LimitSchedule(benchmark::State &state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_limit_schedule(n));
    }
}
BENCHMARK(BM_LimitSchedule)->Arg(10)->Arg(100)->Arg(1000);

} // namespace
