#include "msopt/chebpoly.hpp"
#include "msopt/errors.hpp"
#include "msopt/rng.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace msopt;
using msopt::testing::closed_form_green;

namespace {

const BandSpec kFig1{{1e-4, 2e-4}, {1.0, 10.0}};

}  // namespace

TEST(Cheb, Examples) {
    for (long long d : {0, 1, 2, 7, 50, 1000}) EXPECT_DOUBLE_EQ(cheb_eval(d, 1.0), 1.0);
    EXPECT_NEAR(cheb_eval(3, 0.5), -1.0, 1e-15);
    for (int k = 0; k <= 10000; ++k) {
        const double x = -1.0 + 2.0 * k / 10000.0;
        EXPECT_LE(std::abs(cheb_eval(7, x)), 1.0 + 1e-14);
    }
}

TEST(Cheb, MatchesTrigAndHyperbolicForms) {
    for (long long d : {1, 4, 9, 30}) {
        for (double x : {-0.9, -0.3, 0.2, 0.77}) EXPECT_NEAR(cheb_eval(d, x), std::cos(d * std::acos(x)), 1e-12);
        for (double x : {1.01, 1.5, 3.0}) {
            const double ref = std::cosh(d * std::acosh(x));
            EXPECT_NEAR(cheb_eval(d, x) / ref, 1.0, 1e-12);
            EXPECT_NEAR(cheb_eval(d, -x) / ref, d % 2 ? -1.0 : 1.0, 1e-12);
        }
    }
}

TEST(Cheb, LogFormAtHugeDegree) {
    const SignedLog s = cheb_eval_log(100000, 1.5);
    EXPECT_NEAR(s.log_abs, 100000 * std::acosh(1.5) - std::log(2.0), 1e-6 * s.log_abs);
    EXPECT_EQ(s.sign, 1);
    EXPECT_EQ(cheb_eval_log(3, -2.0).sign, -1);
}

TEST(Damping, Examples) {
    const auto p0 = damping_poly(1, 4, 0);
    EXPECT_EQ(p0(0.0), 1.0);
    EXPECT_EQ(p0(2.5), 1.0);
    const auto p = damping_poly(1, 4, 3);
    EXPECT_EQ(p(0.0), 1.0);
    double mx = 0.0;
    for (int k = 0; k <= 10000; ++k) mx = std::max(mx, std::abs(p(1.0 + 3.0 * k / 10000.0)));
    EXPECT_LE(mx, 0.25);
    EXPECT_LE(sup_norm_on_set(p, BandSpec{{1, 4}}), 0.25);
    EXPECT_THROW(damping_poly(0, 1, 2), DegenerateIntervalError);
    EXPECT_THROW(damping_poly(2, 2, 2), DegenerateIntervalError);
    EXPECT_THROW(damping_poly(3, 2, 2), DegenerateIntervalError);
}

TEST(Damping, ThreeRegionBounds) {
    SplitMix64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const double a = std::exp(rng.uniform() * 8 - 4);
        const double kappa = 2.0 + rng.uniform() * 1000;
        const double b = a * kappa;
        const long long d = static_cast<long long>(rng.next() % 200);
        const auto p = damping_poly(a, b, d);
        ASSERT_EQ(p(0.0), 1.0);
        const double mid = 2.0 * std::pow(1.0 + 2.0 / std::sqrt(kappa), -static_cast<double>(d));
        for (int k = 0; k <= 2000; ++k) {
            const double t = k / 2000.0;
            EXPECT_LE(std::abs(p(a * t)), 1.0 + 1e-12);
            EXPECT_LE(std::abs(p(a + (b - a) * t)), mid * (1.0 + 1e-12) + 1e-300);
            const double x = b * (1.0 + 9.0 * t);
            const SignedLog s = p.eval_log(x);
            EXPECT_LE(s.log_abs, d * std::log(8.0 * x / b) + 1e-12);
        }
    }
}

TEST(Product, SingleBandIsOneDampingPoly) {
    const double eps = 1e-3;
    const auto P = product_poly(BandSpec{{1, 9}}, eps);
    ASSERT_EQ(P.factors.size(), 1u);
    EXPECT_EQ(P.degree(), static_cast<long long>(std::ceil(3.0 * std::ceil(std::log(2.0 / eps)))));
}

TEST(Product, DegreeRecursion) {
    const BandSpec bands{{1, 2}, {8, 16}};
    const double eps = 1e-3;
    const auto P = product_poly(bands, eps);
    const auto d = P.degrees();
    ASSERT_EQ(d.size(), 2u);
    const double c = std::ceil(std::log(2.0 / eps));
    EXPECT_EQ(d[0], static_cast<long long>(std::ceil(std::sqrt(2.0) * c)));
    EXPECT_EQ(d[1], static_cast<long long>(std::ceil(std::sqrt(2.0) * std::ceil(std::log(2.0 / eps) + d[0] * std::log(8.0 * 16 / 2)))));
    EXPECT_EQ(P.degree(), d[0] + d[1]);
    EXPECT_LE(P.degree(), 2 * d[1]);
    EXPECT_EQ(P(0.0), 1.0);
    EXPECT_LE(sup_norm_on_set(P, bands), eps);
}

TEST(Product, EnlargesNarrowBands) {
    const auto e = enlarge_bands(kFig1);
    ASSERT_EQ(e.m(), 2u);
    EXPECT_DOUBLE_EQ(e[0].mu, 1e-4);
    EXPECT_DOUBLE_EQ(e[0].L, 2e-4);
    const auto merged = enlarge_bands(BandSpec{{1, 1.5}, {1.8, 2.5}});
    EXPECT_EQ(merged.m(), 1u);
    EXPECT_LE(merged[0].mu, 1.0);
    EXPECT_GE(merged[0].L, 2.5);
    EXPECT_GE(merged[0].kappa(), 2.0);
    const auto narrow = enlarge_bands(BandSpec{{1, 1.2}, {10, 11}});
    ASSERT_EQ(narrow.m(), 2u);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_GE(narrow[i].kappa(), 2.0 - 1e-12);
}

TEST(Product, CertifiedOnFig1Bands) {
    for (double eps : {1e-2, 1e-4}) {
        const auto P = product_poly(kFig1, eps);
        EXPECT_EQ(P(0.0), 1.0);
        EXPECT_LE(sup_norm_on_set(P, kFig1), eps);
    }
    EXPECT_THROW(product_poly(kFig1, 0.0), InvalidToleranceError);
    EXPECT_THROW(product_poly(kFig1, 1.0), InvalidToleranceError);
}

TEST(SupNorm, ConstantAndGrid) {
    struct One {
        double operator()(double) const { return 1.0; }
    };
    EXPECT_EQ(sup_norm_on_set(One{}, kFig1), 1.0);
    EXPECT_THROW(sup_norm_on_set(One{}, kFig1, 8), ConfigError);
}

TEST(Green, BoundFormula) {
    EXPECT_DOUBLE_EQ(green_bound(BandSpec{{1, 4}}), 4.0);
    EXPECT_NEAR(green_bound(BandSpec{{1, 2}, {8, 16}}), 8.0 / (std::sqrt(4.0) * 0.03 * std::log(64.0)), 1e-12);
    EXPECT_NEAR(green_bound(BandSpec{{1, 2}, {8, 16}}), 32.06, 0.01);
    EXPECT_THROW(green_bound(BandSpec{{1, 1.5}}), HypothesisError);
}

TEST(Green, SingleIntervalClosedForm) {
    for (double kappa : {2.0, 4.0, 10.0, 100.0}) {
        const auto g = green_widom(BandSpec{{1, kappa}});
        EXPECT_NEAR(g.g_numeric, closed_form_green(kappa), 1e-6) << kappa;
        EXPECT_NEAR(g.rho, std::exp(-closed_form_green(kappa)), 1e-6);
        EXPECT_TRUE(g.roots.empty());
    }
    // Scale invariance of g at the origin.
    EXPECT_NEAR(green_widom(BandSpec{{3e-3, 1.2e-2}}).g_numeric, std::log(3.0), 1e-6);
    EXPECT_NEAR(minimax_lower(BandSpec{{1, 4}}, 10), std::pow(3.0, -10), 1e-9);
    EXPECT_EQ(minimax_lower(BandSpec{{1, 4}}, 0), 1.0);
}

TEST(Green, MultiBand) {
    SplitMix64 rng(5);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t m = 2 + trial % 2;
        std::vector<Band> b;
        double lo = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double kappa = 2.0 + 20 * rng.uniform();
            b.push_back({lo, lo * kappa});
            lo = lo * kappa * (1.5 + 30 * rng.uniform());
        }
        const BandSpec bands(b);
        const auto g = green_widom(bands);
        EXPECT_GT(g.g_numeric, 0.0);
        EXPECT_LE(g.g_numeric, g.g_bound);
        EXPECT_GT(g.rho, 0.0);
        EXPECT_LE(g.rho, 1.0);
        ASSERT_EQ(g.roots.size(), m - 1);
        for (std::size_t k = 0; k + 1 < m; ++k) {
            EXPECT_GE(g.roots[k], bands[k].L);
            EXPECT_LE(g.roots[k], bands[k + 1].mu);
        }
        // g shrinks as the set grows: first band <= union <= hull.
        const double hull = closed_form_green(bands[m - 1].L / bands[0].mu);
        EXPECT_GE(g.g_numeric, hull - 1e-9);
        EXPECT_LE(g.g_numeric, closed_form_green(bands[0].kappa()) + 1e-9);
    }
    EXPECT_TRUE(std::isnan(green_widom(BandSpec{{1, 1.5}, {4, 8}}).g_bound));
}

TEST(Green, Sandwich) {
    for (const BandSpec& bands : {kFig1, BandSpec{{1, 2}, {8, 16}}, BandSpec{{1, 4}}, BandSpec{{1, 3}, {10, 40}, {200, 900}}}) {
        for (double eps : {1e-1, 1e-2, 1e-4}) {
            const auto P = product_poly(bands, eps);
            const double sup = sup_norm_on_set(P, bands);
            EXPECT_LE(minimax_lower(bands, P.degree()), sup);
        }
    }
}
