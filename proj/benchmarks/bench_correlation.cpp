#include <benchmark/benchmark.h>

#include "mmsounder/sounder.hpp"
#include "mmsounder/waveform.hpp"

using namespace mmsounder;

static void CorrelateOnePeriod(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto zc = generate_zc({n, 5, 65.536e6});
    const CircularCorrelator correlator(zc);
    for (auto _ : state) {
        auto out = correlator.correlate(zc);
        benchmark::DoNotOptimize(out);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(CorrelateOnePeriod)->RangeMultiplier(4)->Range(64, 8192)->Complexity();

static void PdpFromCapture(benchmark::State& state) {
    const auto m = static_cast<std::uint32_t>(state.range(0));
    const ZcConfig cfg;
    const auto zc = generate_zc(cfg);
    const CircularCorrelator correlator(zc);
    const auto rx = periodic_signal(zc, m);
    for (auto _ : state) {
        auto pdp = pdp_from_capture(rx, correlator, m);
        benchmark::DoNotOptimize(pdp);
    }
}
BENCHMARK(PdpFromCapture)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

BENCHMARK_MAIN();
