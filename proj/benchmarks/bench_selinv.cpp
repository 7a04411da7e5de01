#include <benchmark/benchmark.h>

#include "serinv/parallel.hpp"
#include "serinv/sequential.hpp"

namespace {

using namespace serinv;

// Arguments: n, b, a.
BtaMatrix input(const benchmark::State& state) {
    return generate_spd_bta(1, static_cast<std::size_t>(state.range(0)),
                            static_cast<std::size_t>(state.range(1)),
                            static_cast<std::size_t>(state.range(2)), 1.0);
}

void BM_Pobtaf(benchmark::State& state) {
    const BtaMatrix a = input(state);
    for (auto _ : state) benchmark::DoNotOptimize(pobtaf(a));
}

void BM_Pobtasi(benchmark::State& state) {
    const BtaFactor f = pobtaf(input(state));
    for (auto _ : state) benchmark::DoNotOptimize(pobtasi(f));
}

// Extra argument: ranks.
void BM_Pselinv(benchmark::State& state) {
    const BtaMatrix a = input(state);
    const int ranks = static_cast<int>(state.range(3));
    for (auto _ : state) benchmark::DoNotOptimize(pselinv(a, ranks, kDefaultRatio));
}

}  // namespace

BENCHMARK(BM_Pobtaf)->Args({32, 32, 8})->Args({64, 64, 16})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Pobtasi)->Args({32, 32, 8})->Args({64, 64, 16})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Pselinv)
    ->Args({64, 32, 8, 1})
    ->Args({64, 32, 8, 2})
    ->Args({64, 32, 8, 4})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
