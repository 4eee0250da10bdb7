#include <benchmark/benchmark.h>

#include "mmsounder/codebook.hpp"
#include "mmsounder/scenario.hpp"
#include "mmsounder/sounder.hpp"

using namespace mmsounder;

namespace {

Scenario bench_scenario() {
    Scenario s;
    s.rx_trajectory.waypoints = {{0.0, {0.0, -30.0, 2.4}}, {10.0, {0.0, -230.0, 2.4}}};
    s.tx_trajectory.waypoints = {{0.0, {0.0, 0.0, 15.0}}};
    s.tx_boresight = {180.0, 0.0};
    s.reflectors = {{{3.0, -60.0, 1.2}, 2.0}, {{-4.0, -120.0, 1.5}, 3.0}};
    return s;
}

}  // namespace

static void FullSweep(benchmark::State& state) {
    const Scenario s = bench_scenario();
    const Codebook cb = Codebook::make(60.0, 200, BeamType::rx(2));
    SounderOptions options;
    options.threads = static_cast<unsigned>(state.range(0));
    const Sounder sounder(s, cb, options);
    for (auto _ : state) {
        auto records = sounder.run_sweep(0, 0.1);
        benchmark::DoNotOptimize(records);
    }
    state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(FullSweep)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

static void BuildRaysAtTime(benchmark::State& state) {
    const Scenario s = bench_scenario();
    for (auto _ : state) {
        auto rays = build_rays(s, 1.0);
        benchmark::DoNotOptimize(rays);
    }
}
BENCHMARK(BuildRaysAtTime);
