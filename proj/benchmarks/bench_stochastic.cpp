#include "msopt/stochastic.hpp"

#include <benchmark/benchmark.h>

using namespace msopt;

namespace {

void BM_BatchGradient(benchmark::State& state) {
    const QuadraticProblem p(make_spectrum(BandSpec{{1, 2}, {4, 8}}, {4, 4}), 1);
    const auto mode = state.range(0) ? SampleMode::wishart : SampleMode::per_sample;
    GaussianSampler s(p, 3, mode);
    const Vec x = Vec::Zero(8);
    for (auto _ : state) benchmark::DoNotOptimize(s.batch_gradient(x, 4096).data());
    state.SetLabel(to_string(mode));
}
BENCHMARK(BM_BatchGradient)->Arg(0)->Arg(1);

void BM_BslsRes(benchmark::State& state) {
    StepSchedule s;
    s.T = {14, 40};
    for (auto _ : state) benchmark::DoNotOptimize(bsls_res(BandSpec{{1, 2}, {4, 8}}, 1e-6, s).size());
}
BENCHMARK(BM_BslsRes);

}  // namespace
