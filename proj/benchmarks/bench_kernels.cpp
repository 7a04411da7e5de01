#include <benchmark/benchmark.h>

#include <random>

#include "serinv/kernels.hpp"

namespace {

using namespace serinv;

Block random_block(std::size_t r, std::size_t c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Block x(r, c);
    for (double& v : x.values()) v = u(rng);
    return x;
}

Block spd(std::size_t n) {
    Block m = random_block(n, n, 1);
    Block s = gemm(m, m, 1.0, Trans::No, Trans::Yes);
    for (std::size_t i = 0; i < n; ++i) s(i, i) += static_cast<double>(n);
    return s;
}

void BM_Potrf(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Block s = spd(n);
    for (auto _ : state) benchmark::DoNotOptimize(chol_lower(s));
    state.counters["flops"] = benchmark::Counter(static_cast<double>(n * n * n) / 3.0,
                                                 benchmark::Counter::kIsIterationInvariantRate);
}

void BM_Trsm(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Block l = chol_lower(spd(n));
    const Block b = random_block(n, n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(solve_lower_right(l, b));
    state.counters["flops"] = benchmark::Counter(static_cast<double>(n * n * n),
                                                 benchmark::Counter::kIsIterationInvariantRate);
}

void BM_Gemm(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Block a = random_block(n, n, 3), b = random_block(n, n, 4);
    Block c(n, n);
    for (auto _ : state) {
        gemm_acc(c, a, b, -1.0, 1.0, Trans::No, Trans::Yes);
        benchmark::ClobberMemory();
    }
    state.counters["flops"] = benchmark::Counter(2.0 * static_cast<double>(n * n * n),
                                                 benchmark::Counter::kIsIterationInvariantRate);
}

}  // namespace

BENCHMARK(BM_Potrf)->RangeMultiplier(2)->Range(16, 256);
BENCHMARK(BM_Trsm)->RangeMultiplier(2)->Range(16, 256);
BENCHMARK(BM_Gemm)->RangeMultiplier(2)->Range(16, 256);

BENCHMARK_MAIN();
