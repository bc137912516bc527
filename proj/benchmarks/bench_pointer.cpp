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

#include "weakbell/pointer.hpp"

namespace {

using namespace weakbell;

void BM_OptimalPointerBuild(benchmark::State &state) {
    const PointerOptions opts{1.0 / static_cast<double>(state.range(0)), 1.0,
                              kDefaultEnvelopeCutoff};
    for (auto _ : state) {
        benchmark::DoNotOptimize(make_pointer(PointerFamily::Optimal, 0.8, opts));
    }
}
BENCHMARK(BM_OptimalPointerBuild)->Arg(128)->Arg(512)->Arg(2048);

void BM_QualityAndPrecision(benchmark::State &state) {
    const PointerOptions opts{1.0 / static_cast<double>(state.range(0)), 1.0,
                              kDefaultEnvelopeCutoff};
    const PointerState p = make_pointer(PointerFamily::Gaussian, 1.0, opts);
    for (auto _ : state) {
        benchmark::DoNotOptimize(quality_factor(p));
        benchmark::DoNotOptimize(precision(p));
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(p.size()));
}
BENCHMARK(BM_QualityAndPrecision)->Arg(128)->Arg(512)->Arg(2048);

} // namespace
