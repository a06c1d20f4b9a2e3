#include <benchmark/benchmark.h>

#include "cmcglue/assembler.hpp"
#include "cmcglue/clifford.hpp"

using namespace cmcglue;

static void BM_BuildAtlas(benchmark::State& state) {
    const auto rot = rotation_pair(1, 2, "x", 1, 2, 1, 1);
    const auto G = close_group(1, 2, {rot, rho_pair(1, 2), signs_pair(1, 2, {1, 1}, {1, 1, -1})});
    const GreensField field = solve_greens(1, 2, orbit(G, base_point(1, 2)), 120, 120);
    const double t = minimal_angle(1, 2) + 0.04;
    AtlasResolution res;
    res.cap_density = static_cast<int>(state.range(0));
    for (auto _ : state) {
        const SurfaceAtlas atlas = build_atlas(1, 2, t, G, field, res);
        benchmark::DoNotOptimize(atlas.points.size());
    }
}
BENCHMARK(BM_BuildAtlas)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
