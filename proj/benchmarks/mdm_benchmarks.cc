// Copyright 2026 The mdmsim Authors
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

#include "mdm/mzi.h"
#include "mdm/network.h"
#include "mdm/random.h"
#include "mdm/weightbank.h"

namespace {

using namespace mdm;

MziSpec mzi(std::size_t points) {
    MziSpec s;
    s.coupler = {1030.0, 3.0, 2, 1030.0, 22.4, 0.01};
    s.delta_length_um = 100.0;
    s.group_index = 4.2;
    s.window = {1530.0, 1570.0, points};
    return s;
}

void BM_Sweep(benchmark::State &state) {
    auto spec = mzi(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sweep(spec));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sweep)->Arg(256)->Arg(2001)->Arg(16384);

void BM_ExtinctionRatio(benchmark::State &state) {
    auto s = sweep(mzi(static_cast<std::size_t>(state.range(0))));
    for (auto _ : state) {
        benchmark::DoNotOptimize(extinction_ratio(s));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExtinctionRatio)->Arg(256)->Arg(2001)->Arg(16384);

void BM_Calibrate(benchmark::State &state) {
    auto modes = static_cast<std::size_t>(state.range(0));
    Rng rng(1);
    SimulatedBankHardware hw(make_bank(modes, {1550.0}), MixingMatrix::random(modes, rng));
    auto runner = hw.runner();
    for (auto _ : state) {
        benchmark::DoNotOptimize(calibrate(runner, modes));
    }
}
BENCHMARK(BM_Calibrate)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_Compensate(benchmark::State &state) {
    auto modes = static_cast<std::size_t>(state.range(0));
    Rng rng(2);
    auto mix = MixingMatrix::random(modes, rng);
    auto w = WeightVector::select(modes, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(compensate(w, mix.power()));
    }
}
BENCHMARK(BM_Compensate)->Arg(2)->Arg(4)->Arg(16);

void BM_FixedPoint(benchmark::State &state) {
    NeuronSpec n;
    n.axon_ring = {1549.5, 1.0, 1.0, 1.0};
    n.pump_wavelength_nm = 1550.0;
    Rng rng(3);
    auto net = make_hairpin({n, n}, MixingMatrix::random(2, rng));
    std::vector<RMatrix> paths{calibrate_bank_path(net, 0).power, calibrate_bank_path(net, 1).power};
    RMatrix w(2, 2);
    w << 0.2, -0.4, -0.3, 0.1;
    net = program_weights(std::move(net), w, std::span<const RMatrix>(paths));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_to_fixed_point(net, 1e-12, 10000));
    }
}
BENCHMARK(BM_FixedPoint);

}  // namespace

BENCHMARK_MAIN();
