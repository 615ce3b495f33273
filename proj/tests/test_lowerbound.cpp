#include "msopt/errors.hpp"
#include "msopt/lowerbound.hpp"
#include "msopt/rng.hpp"
#include "oracles.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace msopt;
using msopt::testing::cg_grad_norms;
using msopt::testing::grid_floor;
using msopt::testing::random_tridiag;

TEST(Tridiag, HandCase) {
    Vec lambda(2), v(2);
    lambda << 1, 2;
    v << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    const auto inst = tridiag_from_weights(lambda, v);
    Mat expected(2, 2);
    expected << 1.5, 0.5, 0.5, 1.5;
    EXPECT_LE((inst.T() - expected).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_NEAR(krylov_grad_floor(inst, 1), std::sqrt(0.1), 1e-10);
    EXPECT_NEAR(krylov_grad_floor(inst, 0), 1.0, 1e-15);
    EXPECT_EQ(krylov_grad_floor(inst, 2), 0.0);
    EXPECT_EQ(inst.weights, "unoptimized");
}

TEST(Tridiag, Scalar) {
    Vec lambda(1), v(1);
    lambda << 3.5;
    v << 1.0;
    const auto inst = tridiag_from_weights(lambda, v);
    EXPECT_EQ(inst.T()(0, 0), 3.5);
    EXPECT_EQ(inst.Q(0, 0), 1.0);
}

TEST(Tridiag, Errors) {
    Vec lambda(2), v(2);
    lambda << 1, 1;
    v << 0.6, 0.8;
    EXPECT_THROW(tridiag_from_weights(lambda, v), DegenerateError);
    lambda << 1, 2;
    v << 1.0, 0.0;
    EXPECT_THROW(tridiag_from_weights(lambda, v), DegenerateError);
    v << 0.6, 0.6;
    EXPECT_THROW(tridiag_from_weights(lambda, v), DegenerateError);
    lambda << -1, 2;
    v << 0.6, 0.8;
    EXPECT_THROW(tridiag_from_weights(lambda, v), NonPositiveError);
    EXPECT_THROW(tridiag_from_weights(Vec(0), Vec(0)), EmptyBandError);
    EXPECT_THROW(tridiag_from_weights(Vec::Ones(3), Vec::Ones(2)), DimMismatchError);
    lambda << 1, 2;
    const auto inst = tridiag_from_weights(lambda, v);
    EXPECT_THROW(krylov_grad_floor(inst, -1), ConfigError);
    EXPECT_THROW(hard_instance(BandSpec{{1, 2}}, 0), ConfigError);
}

TEST(Tridiag, RandomInstancesAgainstDenseEigensolver) {
    SplitMix64 rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + trial % 8;
        const auto inst = random_tridiag(rng, n);
        EXPECT_EQ((inst.Q.col(0) - inst.v).cwiseAbs().maxCoeff(), 0.0);
        EXPECT_LE((inst.Q.transpose() * inst.Q - Mat::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
        const Mat T = inst.T();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (std::abs(i - j) > 1) EXPECT_EQ(T(i, j), 0.0);
        for (int i = 0; i + 1 < n; ++i) EXPECT_NE(inst.sub(i), 0.0);
        const Mat dense = inst.Q.transpose() * inst.lambda.asDiagonal() * inst.Q;
        EXPECT_LE((dense - T).cwiseAbs().maxCoeff(), 1e-8 * inst.lambda.maxCoeff());
        Eigen::SelfAdjointEigenSolver<Mat> es(T);
        Vec eig = es.eigenvalues();
        Vec sorted = inst.lambda;
        std::sort(sorted.data(), sorted.data() + n);
        EXPECT_LE((eig - sorted).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(Floor, NonincreasingAndExactAtFullDegree) {
    SplitMix64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 6;
        const auto inst = random_tridiag(rng, n);
        double prev = krylov_grad_floor(inst, 0);
        EXPECT_NEAR(prev, inst.R, 1e-12);
        for (int k = 1; k < n; ++k) {
            const double f = krylov_grad_floor(inst, k);
            EXPECT_LE(f, prev * (1 + 1e-10));
            EXPECT_GE(f, 0.0);
            prev = f;
        }
        EXPECT_EQ(krylov_grad_floor(inst, n), 0.0);
        EXPECT_EQ(krylov_grad_floor(inst, n + 3), 0.0);
    }
}

TEST(Floor, BruteForceGrid) {
    SplitMix64 rng(12);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 2 + trial % 3;
        const auto inst = random_tridiag(rng, n);
        for (int k = 1; k <= std::min(2, n - 1); ++k)
            EXPECT_NEAR(grid_floor(inst, k), krylov_grad_floor(inst, k), 1e-4) << "n=" << n << " k=" << k;
    }
}

TEST(Floor, CgNeverBeatsIt) {
    SplitMix64 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const auto inst = random_tridiag(rng, 8);
        const auto norms = cg_grad_norms(inst, 7);
        for (std::size_t k = 0; k < norms.size(); ++k)
            EXPECT_GE(norms[k], krylov_grad_floor(inst, static_cast<long long>(k)) - 1e-8) << k;
    }
    const auto inst = hard_instance(BandSpec{{1e-4, 2e-4}, {1, 10}}, 6);
    const auto norms = cg_grad_norms(inst, 6);
    for (std::size_t k = 0; k < norms.size(); ++k)
        EXPECT_GE(norms[k], krylov_grad_floor(inst, static_cast<long long>(k)) - 1e-8);
}

TEST(Hard, Shapes) {
    const auto one = hard_instance(BandSpec{{1, 2}}, 1);
    EXPECT_EQ(one.dim(), 2u);
    EXPECT_GE(krylov_grad_floor(one, 1), 0.0);
    for (int i = 0; i < 2; ++i) {
        EXPECT_GE(one.lambda(i), 1.0);
        EXPECT_LE(one.lambda(i), 2.0);
    }
    const BandSpec fig1{{1e-4, 2e-4}, {1, 10}};
    double prev = 1.0;
    for (long long k = 1; k <= 6; ++k) {
        const auto inst = hard_instance(fig1, k);
        EXPECT_EQ(inst.dim(), static_cast<std::size_t>(k + 2));
        for (long long j = 0; j < static_cast<long long>(inst.dim()); ++j) {
            const double l = inst.lambda(j);
            EXPECT_TRUE((l >= 1e-4 && l <= 2e-4) || (l >= 1 && l <= 10)) << l;
            EXPECT_NEAR(inst.v(j), 1.0 / std::sqrt(static_cast<double>(k + 2)), 1e-15);
        }
    }
    const auto inst = hard_instance(fig1, 4);
    for (long long k = 1; k <= 4; ++k) {
        const double f = krylov_grad_floor(inst, k);
        EXPECT_GT(f, 0.0);
        EXPECT_LE(f, prev * (1 + 1e-10));
        prev = f;
    }
}
