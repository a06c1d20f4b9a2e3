#include <benchmark/benchmark.h>

#include "cmcglue/symmetry.hpp"

using namespace cmcglue;

static void BM_GroupClosure(benchmark::State& state) {
    const long k = state.range(0);
    const auto rot = rotation_pair(1, 2, "x", 1, 2, 2, k); // order-k cyclic
    const auto flips = signs_pair(1, 2, {1, 1}, {1, 1, -1});
    for (auto _ : state) {
        const auto G = close_group(1, 2, {rot, rho_pair(1, 2), flips});
        benchmark::DoNotOptimize(G.order());
    }
}
BENCHMARK(BM_GroupClosure)->Arg(6)->Arg(24)->Arg(96);

static void BM_FixedBilinear(benchmark::State& state) {
    const auto rot = rotation_pair(2, 3, "x", 1, 2, 2, 8);
    const auto G = close_group(2, 3, {rot, rho_pair(2, 3)});
    for (auto _ : state) benchmark::DoNotOptimize(fixed_bilinear_dimension(G).dimension);
}
BENCHMARK(BM_FixedBilinear);
