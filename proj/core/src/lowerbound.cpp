#include "msopt/lowerbound.hpp"

#include "msopt/errors.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace msopt {

Mat TridiagInstance::T() const {
    const auto n = lambda.size();
    Mat t = Mat::Zero(n, n);
    t.diagonal() = diag;
    for (Eigen::Index i = 0; i + 1 < n; ++i) t(i + 1, i) = t(i, i + 1) = sub(i);
    return t;
}

Vec TridiagInstance::grad(const Vec& x) const {
    if (x.size() != lambda.size()) throw DimMismatchError("x has the wrong dimension");
    Vec g = diag.cwiseProduct(x);
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
        g(i) += sub(i) * x(i + 1);
        g(i + 1) += sub(i) * x(i);
    }
    g(0) += R;
    return g;
}

TridiagInstance tridiag_from_weights(const Vec& lambda, const Vec& v, double R) {
    const auto n = lambda.size();
    if (n == 0) throw EmptyBandError("no eigenvalues");
    if (v.size() != n) throw DimMismatchError("weights and eigenvalues differ in length");
    if ((lambda.array() <= 0.0).any()) throw NonPositiveError("eigenvalues must be positive");
    if ((v.array() <= 0.0).any()) throw DegenerateError("weights must be positive");
    if (std::abs(v.norm() - 1.0) > 1e-12) throw DegenerateError("weights must have unit norm");
    std::vector<double> s(lambda.data(), lambda.data() + n);
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw DegenerateError("repeated eigenvalue");

    TridiagInstance inst;
    inst.lambda = lambda;
    inst.v = v;
    inst.R = R;
    inst.Q = Mat::Zero(n, n);
    inst.Q.col(0) = v;
    const double scale = lambda.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 1; j < n; ++j) {
        Vec w = lambda.cwiseProduct(inst.Q.col(j - 1));
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index i = 0; i < j; ++i) w -= inst.Q.col(i).dot(w) * inst.Q.col(i);
        const double nw = w.norm();
        if (!(nw > 1e-14 * scale)) throw DegenerateError("Krylov sequence lost rank");
        inst.Q.col(j) = w / nw;
    }
    const Mat T = inst.Q.transpose() * lambda.asDiagonal() * inst.Q;
    inst.diag = T.diagonal();
    inst.sub = Vec::Zero(std::max<Eigen::Index>(n - 1, 0));
    for (Eigen::Index i = 0; i + 1 < n; ++i) inst.sub(i) = 0.5 * (T(i + 1, i) + T(i, i + 1));
    return inst;
}

double krylov_grad_floor(const TridiagInstance& inst, long long k) {
    if (k < 0) throw ConfigError("k must be nonnegative");
    const auto n = inst.lambda.size();
    if (k == 0) return inst.R * inst.v.norm();
    if (k >= n) return 0.0;
    // q(lambda) v in the Krylov basis: column j of Q is q_j(Lambda) v for the
    // discrete orthonormal polynomials q_j of the weights v^2.
    const Mat A = inst.lambda.asDiagonal() * inst.Q.leftCols(k);
    Eigen::ColPivHouseholderQR<Mat> qr(A);
    const Vec rdiag = qr.matrixQR().diagonal().cwiseAbs();
    if (rdiag(k - 1) < 1e-13 * rdiag(0)) throw IllConditionedError("least-squares system is numerically singular");
    const Vec coef = qr.solve(Vec(-inst.v));
    return inst.R * (inst.v + A * coef).norm();
}

TridiagInstance hard_instance(const BandSpec& bands, long long k, double R) {
    validate_bands(bands);
    if (k < 1) throw ConfigError("k must be at least 1");
    const auto m = static_cast<long long>(bands.m());
    const long long total = k + m;
    std::vector<double> lam;
    for (long long i = 0; i < m; ++i) {
        const long long cnt = total / m + (i >= m - total % m ? 1 : 0);
        const auto& b = bands[static_cast<std::size_t>(i)];
        if (cnt == 1) {
            lam.push_back(0.5 * (b.mu + b.L));
            continue;
        }
        for (long long j = 0; j < cnt; ++j) {
            const double t = std::cos(std::numbers::pi * static_cast<double>(cnt - 1 - j) / static_cast<double>(cnt - 1));
            lam.push_back(b.mu + 0.5 * (b.L - b.mu) * (1.0 + t));
        }
    }
    const Vec lambda = Eigen::Map<const Vec>(lam.data(), static_cast<Eigen::Index>(lam.size()));
    const Vec v = Vec::Constant(lambda.size(), 1.0 / std::sqrt(static_cast<double>(lambda.size())));
    return tridiag_from_weights(lambda, v, R);
}

}  // namespace msopt
