#include "msopt/chebpoly.hpp"
#include "msopt/lowerbound.hpp"

#include <benchmark/benchmark.h>

using namespace msopt;

namespace {

void BM_ChebEvalLog(benchmark::State& state) {
    const long long d = state.range(0);
    double x = 1.3;
    for (auto _ : state) {
        auto s = cheb_eval_log(d, x);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_ChebEvalLog)->Arg(10)->Arg(1000)->Arg(100000);

void BM_ProductPolyCertify(benchmark::State& state) {
    const BandSpec bands{{1e-4, 2e-4}, {1, 10}};
    for (auto _ : state) {
        const auto P = product_poly(bands, 1e-4);
        benchmark::DoNotOptimize(sup_norm_on_set(P, bands));
    }
}
BENCHMARK(BM_ProductPolyCertify)->Unit(benchmark::kMillisecond);

void BM_GreenWidom(benchmark::State& state) {
    const BandSpec two{{1, 2}, {8, 16}};
    const BandSpec three{{1, 3}, {10, 40}, {200, 900}};
    const BandSpec& bands = state.range(0) == 2 ? two : three;
    for (auto _ : state) benchmark::DoNotOptimize(green_widom(bands).g_numeric);
}
BENCHMARK(BM_GreenWidom)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_KrylovFloor(benchmark::State& state) {
    const auto inst = hard_instance(BandSpec{{1e-4, 2e-4}, {1, 10}}, state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(krylov_grad_floor(inst, state.range(0)));
}
BENCHMARK(BM_KrylovFloor)->Arg(8)->Arg(32);

}  // namespace
