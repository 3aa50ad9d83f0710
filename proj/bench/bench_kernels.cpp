// SPDX-License-Identifier: Apache-2.0
//
// gscm3d: 3D geometry-based stochastic channel model simulator
// Copyright (C) 2026 The gscm3d authors
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
// Serial reference vs OpenMP coefficient kernel, and per-link evaluation.

#include <benchmark/benchmark.h>

#include "gscm/channel.hpp"
#include "gscm/config.hpp"
#include "gscm/simulation.hpp"

using namespace gscm;

namespace {

struct Fixture
{
    ClusterSet clusters;
    ArrayGeometry tx, rx;
    CoefficientOptions options;
};

const Fixture& fixture()
{
    static const Fixture f = [] {
        Fixture x;
        const ScenarioParams p = default_scenario_params(ScenarioKind::UMa);
        LinkContext link;
        link.geometry = compute_link_geometry({0, 0, 25}, 30.0, {180, 90, 1.5});
        link.ue_velocity = {0.8, 0.3, 0.0};
        const LspTable& t = p.table(Propagation::NLOS);
        RngStream rng(5, {0, 0, kSiteLevel, 0, Stage::Lsp});
        const LargeScaleParams lsp = generate_lsps(rng, link.geometry.d_2d, 1.5, false, t, p.elevation);
        x.clusters = generate_clusters(5, {0, 0, kSiteLevel, 0, Stage::Test}, link, lsp, t, p.elevation, p.scaling);

        x.tx.rows = 8;
        x.tx.cols = 4;
        x.tx.slants_deg = {45.0, -45.0};
        x.tx.wavelength = 0.15;
        x.rx.slants_deg = {0.0, 90.0};
        x.rx.pattern = ElementPattern::isotropic_pattern(0.0);
        x.rx.wavelength = 0.15;
        x.options.sample_times = {0.0, 1e-3, 2e-3, 3e-3};
        return x;
    }();
    return f;
}

void BM_coefficient_serial(benchmark::State& state)
{
    const Fixture& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(channel_coefficient_serial(f.clusters, f.tx, f.rx, f.options));
}

void BM_coefficient_openmp(benchmark::State& state)
{
    const Fixture& f = fixture();
    CoefficientOptions o = f.options;
    o.workers = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(channel_coefficient(f.clusters, f.tx, f.rx, o));
}

void BM_simulate_drop(benchmark::State& state)
{
    ValidationResult v = parse_config("seed: 3\nscenarios: [UMa]\nlayout: {rings: 1}\n", "bench.yaml", ".");
    const RunConfig c = *v.config;
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate(c, static_cast<int>(state.range(0))));
}

} // namespace

BENCHMARK(BM_coefficient_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_coefficient_openmp)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_simulate_drop)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
