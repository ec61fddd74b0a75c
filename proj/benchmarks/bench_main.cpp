// SPDX-License-Identifier: Apache-2.0
//
// nfbeam: near-field beam training simulation for uniform planar arrays
// Copyright (C) 2026 The nfbeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <benchmark/benchmark.h>

#include "nfbeam/channel.hpp"
#include "nfbeam/codebook.hpp"
#include "nfbeam/training.hpp"
#include "nfbeam/wavefield.hpp"

using namespace nfbeam;

namespace
{
    const ArrayConfig cfg64{64, 64, 28e9};

    void BM_SteeringVector(benchmark::State &state)
    {
        const ArrayConfig cfg{static_cast<int>(state.range(0)), static_cast<int>(state.range(0)), 28e9};
        for (auto _ : state)
            benchmark::DoNotOptimize(steering_vector(cfg, {0.3, 5.0, -0.2}));
    }
    BENCHMARK(BM_SteeringVector)->Arg(32)->Arg(64)->Arg(128);

    void BM_DivergingCodeword(benchmark::State &state)
    {
        const Point3 v = virtual_focal_point(cfg64, {3, 2, 5});
        for (auto _ : state)
            benchmark::DoNotOptimize(diverging_codeword(cfg64, v));
    }
    BENCHMARK(BM_DivergingCodeword);

    void BM_FrustumPlan(benchmark::State &state)
    {
        for (auto _ : state)
            benchmark::DoNotOptimize(refinement_plan_frustum(cfg64, 9, {9, 200, 310}, {1, 3, 5}));
    }
    BENCHMARK(BM_FrustumPlan);

    void BM_RodPlan(benchmark::State &state)
    {
        const ShellIndex h = shell_locate(cfg64, 9, Axis::horizontal, {2.0, 12.0, -3.0});
        const ShellIndex v = shell_locate(cfg64, 9, Axis::vertical, {2.0, 12.0, -3.0});
        for (auto _ : state)
            benchmark::DoNotOptimize(refinement_plan_rod(cfg64, 9, h.idx, v.idx, {1, 3, 5}));
    }
    BENCHMARK(BM_RodPlan);

    void BM_TwoPhaseTraining(benchmark::State &state)
    {
        const Point3 ue{2.0, 12.0, -3.0};
        const ChannelParams params{};
        std::uint64_t trial = 0;
        for (auto _ : state)
        {
            const MultipathChannel ch = sample_channel(cfg64, ue, params, 11, trial);
            const PilotOracle oracle = oracle_from_channel(cfg64, ch, 11, trial++);
            benchmark::DoNotOptimize(two_phase_train(cfg64, oracle, 9, {1, 3, 5}));
        }
    }
    BENCHMARK(BM_TwoPhaseTraining)->Unit(benchmark::kMillisecond);
}

BENCHMARK_MAIN();
