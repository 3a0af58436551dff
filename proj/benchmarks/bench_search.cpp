#include <benchmark/benchmark.h>

#include "epsearch/exceptional.hpp"
#include "epsearch/experiments.hpp"
#include "epsearch/graphs.hpp"
#include "epsearch/monitored.hpp"
#include "epsearch/topology.hpp"

using namespace epsearch;

namespace {

void BM_Diagonalize(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto g = build_sk(n, 1);
    for (auto _ : state) benchmark::DoNotOptimize(diagonalize(g, basis_state(n, 0)));
}
BENCHMARK(BM_Diagonalize)->Arg(16)->Arg(50)->Arg(128);

// Projection loop over many attempts; dominates the SK sweep.
void BM_DetectionSeries(benchmark::State& state) {
    const int n = 50;
    const auto g = build_sk(n, 1);
    const auto spectral = diagonalize(g, basis_state(n, 0));
    const Protocol protocol{0.7, basis_state(n, 0), static_cast<int>(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(first_detection_series(spectral, protocol, basis_state(n, 1)));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DetectionSeries)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_SurvivalSpectrum(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto g = build_funnel(n, 1.0);
    const auto s = survival_operator(g, basis_state(n, 0), designed_tau(n, 1.0));
    for (auto _ : state) benchmark::DoNotOptimize(survival_spectrum(s));
}
BENCHMARK(BM_SurvivalSpectrum)->Arg(16)->Arg(64);

void BM_GeneratingFunction(benchmark::State& state) {
    const int n = 16;
    const auto g = build_crawl(n, 1.0);
    const Protocol protocol{designed_tau(n, 1.0), basis_state(n, 0), 1};
    for (auto _ : state)
        benchmark::DoNotOptimize(generating_function(g, protocol, basis_state(n, 3), default_theta_samples(n)));
}
BENCHMARK(BM_GeneratingFunction)->Unit(benchmark::kMillisecond);

void BM_NoiseRun(benchmark::State& state) {
    const int n = 50;
    const auto g = build_funnel(n, 1.0);
    NoiseConfig config;
    config.magnitude_a = 0.1;
    config.realizations = 100;
    config.threads = static_cast<unsigned>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(noise_run(g, basis_state(n, 0), basis_state(n, n - 1), config));
}
BENCHMARK(BM_NoiseRun)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
