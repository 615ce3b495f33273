#include "msopt/errors.hpp"
#include "msopt/stochastic.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace msopt;

namespace {

QuadraticProblem diag_problem(const std::vector<double>& eig, const BandSpec& bands, const Vec& x_star) {
    const auto d = static_cast<Eigen::Index>(eig.size());
    return QuadraticProblem(spectrum_from_eigenvalues(bands, eig), Mat::Identity(d, d), x_star);
}

}  // namespace

TEST(Sampler, ZeroOptimumGivesZeroTargets) {
    const QuadraticProblem p(make_spectrum(BandSpec{{1, 2}, {4, 8}}, {2, 2}), 3, Vec::Zero(4));
    GaussianSampler s(p, 1);
    Vec a;
    double b = 1.0;
    for (int k = 0; k < 100; ++k) {
        s.draw(a, b);
        EXPECT_EQ(b, 0.0);
    }
    EXPECT_EQ(s.consumed(), 100);
}

TEST(Sampler, TargetsAreExactInnerProducts) {
    const QuadraticProblem p(make_spectrum(BandSpec{{1, 2}, {4, 8}}, {2, 2}), 3);
    GaussianSampler s(p, 9);
    Vec a;
    double b = 0.0;
    for (int k = 0; k < 50; ++k) {
        s.draw(a, b);
        EXPECT_EQ(b, a.dot(p.x_star()));
    }
}

TEST(Sampler, IdentityCovariance) {
    const auto p = diag_problem({1, 1, 1}, BandSpec{{0.5, 2}}, Vec::Ones(3));
    GaussianSampler s(p, 4);
    Mat S = Mat::Zero(3, 3);
    Vec a;
    double b = 0.0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
        s.draw(a, b);
        S += a * a.transpose();
    }
    S /= n;
    EXPECT_LE((S - Mat::Identity(3, 3)).cwiseAbs().maxCoeff(), 0.05);
}

TEST(Sampler, GaussianKurtosis) {
    const QuadraticProblem p(make_spectrum(BandSpec{{1, 2}, {4, 8}}, {2, 2}), 6);
    GaussianSampler s(p, 12);
    SplitMix64 rng(2);
    Vec w(4);
    for (int j = 0; j < 4; ++j) w(j) = rng.normal();
    double m2 = 0.0, m4 = 0.0;
    Vec a;
    double b = 0.0;
    const int n = 1000000;
    for (int k = 0; k < n; ++k) {
        s.draw(a, b);
        const double t = w.dot(a);
        m2 += t * t;
        m4 += t * t * t * t;
    }
    m2 /= n;
    m4 /= n;
    const double kurt = m4 / (m2 * m2);
    EXPECT_GE(kurt, 2.8);
    EXPECT_LE(kurt, 3.2);
}

TEST(Sampler, WishartMomentMatchesCovariance) {
    const QuadraticProblem p(make_spectrum(BandSpec{{1, 2}, {4, 8}}, {2, 2}), 6);
    for (SampleMode mode : {SampleMode::per_sample, SampleMode::wishart}) {
        GaussianSampler s(p, 5, mode);
        Mat mean = Mat::Zero(4, 4);
        const int reps = 2000;
        for (int k = 0; k < reps; ++k) mean += s.batch_moment(50);
        mean /= reps;
        EXPECT_LE((mean - p.A()).cwiseAbs().maxCoeff(), 0.05 * p.A().cwiseAbs().maxCoeff()) << to_string(mode);
        EXPECT_EQ(s.consumed(), 50LL * reps);
    }
    EXPECT_EQ(parse_sample_mode("per-sample"), SampleMode::per_sample);
    EXPECT_THROW(parse_sample_mode("poisson"), ConfigError);
}

TEST(Sampler, Determinism) {
    const QuadraticProblem p(make_spectrum(BandSpec{{1, 2}, {4, 8}}, {2, 2}), 6);
    GaussianSampler s1(p, 77), s2(p, 77);
    const Vec x = Vec::Ones(4);
    for (int k = 0; k < 10; ++k) EXPECT_TRUE(s1.batch_gradient(x, 7) == s2.batch_gradient(x, 7));
}

TEST(StochStep, FixedPointAndConsumption) {
    const QuadraticProblem p(make_spectrum(BandSpec{{1, 2}, {4, 8}}, {2, 2}), 6);
    GaussianSampler s(p, 1);
    const Vec x = gd_stoch_step(s, p.x_star(), 8.0, 13);
    EXPECT_LE((x - p.x_star()).norm(), 1e-14 * p.x_star().norm());
    EXPECT_EQ(s.consumed(), 13);
    EXPECT_THROW(gd_stoch_step(s, x, 8.0, 0), ConfigError);
}

TEST(StochStep, OneDimensionalDeterministicSample) {
    Vec xs(1);
    xs << 2.0;
    const auto p = diag_problem({1.0}, BandSpec{{0.5, 2}}, xs);
    SweepSampler s(p);
    Vec x(1);
    x << 5.0;
    const Vec y = gd_stoch_step(s, x, 4.0, 1);
    EXPECT_NEAR(y(0), 5.0 - 3.0 / 4.0, 1e-15);
}

TEST(StochStep, LargeBatchMatchesGradientStep) {
    Vec xs(3);
    xs << 1, -1, 2;
    const auto p = diag_problem({1, 2, 9}, BandSpec{{1, 2}, {8, 10}}, xs);
    GaussianSampler s(p, 3, SampleMode::per_sample);
    const Vec x = Vec::Zero(3);
    const Vec noisy = gd_stoch_step(s, x, 10.0, 100000);
    QuadraticOracle o(p);
    const Vec exact = gd_step(o, x, 10.0);
    EXPECT_LE((noisy - exact).norm(), 0.02 * exact.norm());
}

TEST(StochStep, Unbiased) {
    const QuadraticProblem p(make_spectrum(BandSpec{{1, 2}, {4, 8}}, {2, 2}), 6);
    GaussianSampler s(p, 8);
    const Vec x = Vec::Ones(4);
    const Vec exact = p.grad(x);
    const int trials = 4000;
    Vec sum = Vec::Zero(4), sumsq = Vec::Zero(4);
    for (int k = 0; k < trials; ++k) {
        const Vec g = s.batch_gradient(x, 5);
        sum += g;
        sumsq += g.cwiseProduct(g);
    }
    const Vec mean = sum / trials;
    for (int j = 0; j < 4; ++j) {
        const double var = sumsq(j) / trials - mean(j) * mean(j);
        EXPECT_LE(std::abs(mean(j) - exact(j)), 3.0 * std::sqrt(var / trials) + 1e-12) << j;
    }
}

TEST(Schedule, Examples) {
    const auto one = schedule_stoch(BandSpec{{1, 1}}, 1.0, 9.0 / std::exp(1.0), 3.0, 1, 1);
    EXPECT_EQ(one.schedule.T, (std::vector<long long>{1}));
    const auto two = schedule_stoch(BandSpec{{1, 2}, {4, 8}}, 1.0, 1e-2, 3.0, 4, 2);
    EXPECT_EQ(two.schedule.T[1], 40);
    EXPECT_EQ(two.schedule.T[0], static_cast<long long>(std::ceil(2.0 * std::log(900.0))));
    const double prod = static_cast<double>(two.schedule.T[0] * two.schedule.T[1]);
    EXPECT_EQ(two.n_avg, static_cast<long long>(std::ceil(3.0 * 4 * 4 * prod * 40)));
    const auto mult = schedule_stoch(BandSpec{{1, 2}, {4, 8}}, 1.0, 1e-2, 3.0, 4, 2, BatchScale::multiplicity);
    EXPECT_EQ(mult.n_avg * 2, two.n_avg);
    EXPECT_DOUBLE_EQ(two.delta(2), 3.0 * 2 / static_cast<double>(two.n_avg));
    EXPECT_THROW(schedule_stoch(BandSpec{{1, 2}}, 1.0, 0.0, 3.0, 1, 1), InvalidToleranceError);

    long long prev = 0;
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
        const auto c = schedule_stoch(BandSpec{{1, 2}, {4, 8}}, 1.0, eps, 3.0, 4, 2);
        EXPECT_GE(c.n_avg, prev);
        prev = c.n_avg;
    }
}

TEST(BslsStoch, SweepSamplerIsExactGd) {
    const QuadraticProblem p(make_spectrum(BandSpec{{1, 4}}, {3}), 2);
    SweepSampler s(p);
    StochConfig c;
    c.n_avg = 3;
    c.schedule.T = {25};
    const auto res = bsls_stoch(s, p.bands(), Vec::Zero(3), c, RunOptions{&p});
    QuadraticOracle o(p);
    Vec x = Vec::Zero(3);
    for (int k = 0; k < 25; ++k) x = gd_step(o, x, 4.0);
    EXPECT_LE((res.x - x).norm(), 1e-12 * (1 + x.norm()));
    EXPECT_EQ(s.consumed(), 75);
    EXPECT_EQ(res.trace.last().samples, 75);
    EXPECT_NEAR(res.trace.last().dist_sq, (x - p.x_star()).squaredNorm(), 1e-12);
}

TEST(BslsStoch, HugeBatchTracksDeterministicBsls) {
    const QuadraticProblem p(make_spectrum(BandSpec{{1, 4}}, {4}), 2);
    GaussianSampler s(p, 1, SampleMode::wishart);
    StochConfig c;
    c.n_avg = 100000000;
    c.schedule.T = {10};
    const auto res = bsls_stoch(s, p.bands(), Vec::Zero(4), c);
    QuadraticOracle o(p);
    const auto det = bsls(o, p.bands(), Vec::Zero(4), c.schedule);
    EXPECT_LE((res.x - det.x).norm(), 0.01 * (det.x - Vec::Zero(4)).norm());
}

TEST(BslsStoch, SampleCountAndDeterminism) {
    const QuadraticProblem p(make_spectrum(BandSpec{{1, 2}, {4, 8}}, {2, 2}), 6);
    StochConfig c;
    c.n_avg = 40;
    c.schedule.T = {3, 4};
    GaussianSampler s1(p, 3), s2(p, 3);
    const auto a = bsls_stoch(s1, p.bands(), Vec::Zero(4), c, RunOptions{&p});
    const auto b = bsls_stoch(s2, p.bands(), Vec::Zero(4), c, RunOptions{&p});
    EXPECT_EQ(s1.consumed(), 40 * bsls_query_count(c.schedule));
    EXPECT_TRUE(a.x == b.x);
    EXPECT_EQ(trace_csv(a.trace), trace_csv(b.trace));
}

TEST(BslsStoch, MeanDistanceWithinTwiceTarget) {
    const QuadraticProblem p(make_spectrum(BandSpec{{1, 2}, {4, 8}}, {2, 2}), 1);
    const Vec x0 = Vec::Zero(4);
    const double dist0 = p.x_star().squaredNorm();
    const double eps = 0.05 * dist0;
    const auto c = schedule_stoch(p.bands(), dist0, eps, 3.0, 4, 2);
    const auto trials = run_stoch_trials(p, x0, c, 10, 5, SampleMode::wishart);
    double mean = 0.0;
    for (const auto& t : trials) mean += t.final_dist_sq / trials.size();
    EXPECT_LE(mean, 2.0 * eps);
}

TEST(Residual, ScalarDecay) {
    StepSchedule s;
    s.T = {30};
    const auto r = bsls_res(BandSpec{{1, 5}}, 0.0, s);
    ASSERT_EQ(r.size(), 31u);
    for (std::size_t t = 0; t < r.size(); ++t) EXPECT_NEAR(r[t][0], std::pow(1.0 - 0.1, static_cast<double>(t)), 1e-14);
}

TEST(Residual, NoiselessTwoBands) {
    StepSchedule s;
    s.T = {3, 5};
    const BandSpec bands{{1, 2}, {10, 20}};
    const auto r = bsls_res(bands, 0.0, s);
    ASSERT_EQ(static_cast<long long>(r.size()), bsls_query_count(s) + 1);
    EXPECT_EQ(r[0], (std::vector<double>{1.0, 1.0}));
    ResidualModel model(bands, 0.0, s);
    EXPECT_EQ(model.U(1)(0, 1), 0.0);
    EXPECT_EQ(model.lambda(r[0]), 1.0);
    // The first inner run touches only the second band's bound.
    EXPECT_EQ(r[5][0], 1.0);
    EXPECT_LT(r[5][1], 1.0);
    for (const auto& v : r)
        for (double x : v) EXPECT_GE(x, 0.0);
}

TEST(Residual, ModelPieces) {
    StepSchedule s;
    s.T = {2, 3};
    const BandSpec bands{{1, 2}, {10, 20}};
    ResidualModel model(bands, 0.01, s);
    EXPECT_DOUBLE_EQ(model.gamma(1), 0.75);
    EXPECT_DOUBLE_EQ(model.N(1), 7.0);
    EXPECT_DOUBLE_EQ(model.N(2), 1.0);
    EXPECT_DOUBLE_EQ(model.N(0), 35.0);
    const Mat u = model.U(0);
    EXPECT_DOUBLE_EQ(u(0, 0), 0.25);
    EXPECT_DOUBLE_EQ(u(1, 1), 81.0);
    EXPECT_DOUBLE_EQ(u(0, 1), 0.01 * 0.25 * 2 * 20);
    EXPECT_THROW(ResidualModel(bands, -1.0, s), ConfigError);
}

TEST(Residual, BoundDominatesMonteCarlo) {
    const QuadraticProblem p(make_spectrum(BandSpec{{1, 2}, {4, 8}}, {2, 2}), 3);
    StepSchedule s;
    s.T = {3, 4};
    const long long n_avg = 400;
    const double delta = 3.0 * 2 / n_avg;
    const auto bound = bsls_res(p.bands(), delta, s);
    const auto est = estimate_residuals(p, s, n_avg, 200, 17);
    ASSERT_EQ(bound.size(), est.mean.size());
    const auto& band_of = p.spectrum().band_of;
    for (std::size_t t = 0; t < bound.size(); ++t)
        for (std::size_t j = 0; j < band_of.size(); ++j)
            EXPECT_LE(est.mean[t][j], bound[t][band_of[j]] * (1 + 1e-12) + 3.0 * est.std_error[t][j]) << "step " << t;
}
