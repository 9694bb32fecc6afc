#include "tsparse/fit.hpp"
#include "tsparse/oracle.hpp"

#include <benchmark/benchmark.h>

using namespace tsparse;

static void BM_ZetaInf(benchmark::State& state) {
    const double y = static_cast<double>(state.range(0));
    const PowerIndex d(1.09);
    for (auto _ : state) benchmark::DoNotOptimize(log_zeta_inf(y, d));
}
BENCHMARK(BM_ZetaInf)->Arg(2)->Arg(6)->Arg(20);

// terms grow like t^2 / k until the Euler-Maclaurin remainder takes over
static void BM_ZetaK(benchmark::State& state) {
    const double t = static_cast<double>(state.range(0));
    const DegreesOfFreedom k(6.0);
    const PowerIndex d(0.6);
    for (auto _ : state) benchmark::DoNotOptimize(log_zeta_k(t, k, d));
}
BENCHMARK(BM_ZetaK)->Arg(3)->Arg(30)->Arg(300)->Arg(100000);

static void BM_PitTransform(benchmark::State& state) {
    const DegreesOfFreedom k(6.0);
    double t = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pit_transform(t, k));
        t = t > 50.0 ? 0.5 : t * 1.1;
    }
}
BENCHMARK(BM_PitTransform);

static void BM_SimulatePanel(benchmark::State& state) {
    const ModelParams p(0.01, PowerIndex(1.0), DegreesOfFreedom(6.0));
    for (auto _ : state) benchmark::DoNotOptimize(simulate_panel(p, 7680, 1).scores.data());
}
BENCHMARK(BM_SimulatePanel)->Unit(benchmark::kMillisecond);

// the HIV panel size; the fit grid over d dominates
static void BM_FitPanel(benchmark::State& state) {
    const auto kind = state.range(0) == 0 ? NullKind::t : NullKind::z;
    auto sim = simulate_panel(ModelParams(0.006, PowerIndex(0.8), DegreesOfFreedom(6.0)), 7680, 3);
    ScorePanel panel(std::move(sim.scores), DegreesOfFreedom(6.0));
    panel.ensure_z_scores();
    for (auto _ : state) benchmark::DoNotOptimize(fit_ml(panel, kind, std::nullopt).rho_hat);
    state.SetLabel(kind == NullKind::t ? "t-null" : "z-null");
}
BENCHMARK(BM_FitPanel)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_CoefficientQuadrature(benchmark::State& state) {
    const PowerIndex d(0.5);
    for (auto _ : state) benchmark::DoNotOptimize(oracle::coefficient_quadrature(d, 20).value);
}
BENCHMARK(BM_CoefficientQuadrature)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
