#include <benchmark/benchmark.h>

#include "cmcglue/greens.hpp"
#include "cmcglue/symmetry.hpp"

using namespace cmcglue;

namespace {

GreensField make_field(int caps) {
    const auto rot = rotation_pair(1, 2, "x", 1, 2, 1, 1); // x-plane rotation by pi
    const auto G = close_group(1, 2, {rot, rho_pair(1, 2)});
    return solve_greens(1, 2, orbit(G, base_point(1, 2)), caps, caps);
}

} // namespace

static void BM_GreensEvaluate(benchmark::State& state) {
    const GreensField field = make_field(static_cast<int>(state.range(0)));
    const ProductChart chart = ProductChart::canonical(1, 2);
    Eigen::VectorXd zbar(3);
    zbar << 0.21, 0.13, 0.08;
    const ProductPoint z = chart.point(zbar);
    for (auto _ : state) benchmark::DoNotOptimize(field.evaluate(z).value);
}
BENCHMARK(BM_GreensEvaluate)->Arg(40)->Arg(160)->Arg(640);

static void BM_GreensChartJet(benchmark::State& state) {
    const GreensField field = make_field(static_cast<int>(state.range(0)));
    const ProductChart chart = ProductChart::canonical(1, 2);
    Eigen::VectorXd zbar(3);
    zbar << 0.05, 0.03, 0.02;
    const double sigma = field.jet_sigma(zbar.norm());
    for (auto _ : state) benchmark::DoNotOptimize(field.chart_jet(chart, zbar, sigma).value);
}
BENCHMARK(BM_GreensChartJet)->Arg(160)->Arg(640);
