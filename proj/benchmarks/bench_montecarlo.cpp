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

#include <memory>
#include <vector>

#include "weakbell/bell.hpp"
#include "weakbell/montecarlo.hpp"
#include "weakbell/pointer.hpp"

namespace {

using namespace weakbell;

BellChainConfig double_chain() {
    const Settings t = tsirelson_settings();
    std::vector<BobStage> stages;
    stages.push_back(BobStage::with_pointer(
        t.bob, std::make_shared<const PointerState>(
                   pointer_for_precision(PointerFamily::Optimal, 0.8))));
    stages.push_back(BobStage::with_pointer(
        t.bob, std::make_shared<const PointerState>(make_square(1.0))));
    return make_chain(t.alice, std::move(stages));
}

void BM_DoubleChainTrials(benchmark::State &state) {
    const BellChainConfig cfg = double_chain();
    const auto trials = static_cast<std::uint64_t>(state.range(0));
    std::uint64_t seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_chain(cfg, trials, seed++, {1, 0}));
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(trials));
}
BENCHMARK(BM_DoubleChainTrials)->Arg(10000)->Unit(benchmark::kMillisecond);

} // namespace
