#include "msopt/precision.hpp"
#include "msopt/solvers.hpp"

#include <benchmark/benchmark.h>

using namespace msopt;

namespace {

const QuadraticProblem& fig1_problem() {
    static const QuadraticProblem p(make_spectrum(BandSpec{{1e-4, 2e-4}, {1, 10}}, {10, 10}), 1);
    return p;
}

void BM_GdStep(benchmark::State& state) {
    const auto d = static_cast<int>(state.range(0));
    const QuadraticProblem p(make_spectrum(BandSpec{{1, 2}, {8, 16}}, {d / 2, d / 2}), 3);
    QuadraticOracle o(p);
    Vec x = Vec::Zero(d);
    for (auto _ : state) {
        x = gd_step(o, x, 16.0);
        benchmark::DoNotOptimize(x.data());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GdStep)->Arg(20)->Arg(100)->Arg(400);

void BM_Bsls(benchmark::State& state) {
    const auto& p = fig1_problem();
    const Vec x0 = Vec::Zero(20);
    const double gap0 = p.gap(x0);
    const auto s = schedule_bsls(p.bands(), gap0, 1e-8 * gap0);
    for (auto _ : state) {
        QuadraticOracle o(p);
        auto r = bsls(o, p.bands(), x0, s);
        benchmark::DoNotOptimize(r.x.data());
    }
    state.counters["queries"] = static_cast<double>(bsls_query_count(s));
}
BENCHMARK(BM_Bsls)->Unit(benchmark::kMillisecond);

void BM_Acbsls(benchmark::State& state) {
    const auto& p = fig1_problem();
    const Vec x0 = Vec::Zero(20);
    const double psi0 = band_diagnostics(p, x0, x0).psi_total();
    const auto s = schedule_acbsls(p.bands(), psi0, 1e-8 * psi0);
    for (auto _ : state) {
        QuadraticOracle o(p);
        auto r = acbsls(o, p.bands(), x0, x0, s);
        benchmark::DoNotOptimize(r.x.data());
    }
    state.counters["queries"] = static_cast<double>(acbsls_query_count(s));
}
BENCHMARK(BM_Acbsls)->Unit(benchmark::kMillisecond);

void BM_Cg(benchmark::State& state) {
    const auto& p = fig1_problem();
    for (auto _ : state) {
        auto t = cg(p, Vec::Zero(20), 20, 0.0);
        benchmark::DoNotOptimize(t.rows.data());
    }
}
BENCHMARK(BM_Cg);

void BM_OrderingRounded(benchmark::State& state) {
    const QuadraticProblem p(make_spectrum(BandSpec{{0.001, 0.002}, {0.5, 1}}, {10, 10}), 1);
    const auto plan = make_plan(OrderingPreset::interleaved, {20, 240});
    const PrecisionConfig c{static_cast<int>(state.range(0))};
    for (auto _ : state) {
        auto t = run_ordering(p, plan, c, Vec::Zero(20));
        benchmark::DoNotOptimize(t.rows.data());
    }
}
BENCHMARK(BM_OrderingRounded)->Arg(20)->Arg(53);

}  // namespace
