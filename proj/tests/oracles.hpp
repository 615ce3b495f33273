#pragma once

#include "msopt/lowerbound.hpp"
#include "msopt/rng.hpp"

#include <cmath>
#include <vector>

namespace msopt::testing {

// g at the origin for the single interval [mu, kappa mu], from the conformal map.
inline double closed_form_green(double kappa) {
    const double s = std::sqrt(kappa);
    return std::log((s + 1.0) / (s - 1.0));
}

// Distinct eigenvalues spaced at least 0.05 apart, positive unit weights.
inline TridiagInstance random_tridiag(SplitMix64& rng, int n) {
    Vec lambda(n), v(n);
    double l = 0.1;
    for (int i = 0; i < n; ++i) {
        l += 0.05 + rng.uniform();
        lambda(i) = l;
        v(i) = 0.1 + rng.uniform();
    }
    v /= v.norm();
    return tridiag_from_weights(lambda, v, 0.5 + rng.uniform());
}

// Textbook CG on T x = -R e1 from 0; gradient norm after each step.
inline std::vector<double> cg_grad_norms(const TridiagInstance& inst, int steps) {
    const Mat T = inst.T();
    Vec x = Vec::Zero(T.rows());
    Vec r = -inst.grad(x);
    Vec p = r;
    std::vector<double> out{r.norm()};
    for (int k = 0; k < steps && r.norm() > 1e-300; ++k) {
        const Vec Tp = T * p;
        const double alpha = r.squaredNorm() / p.dot(Tp);
        x += alpha * p;
        const Vec r_new = r - alpha * Tp;
        p = r_new + (r_new.squaredNorm() / r.squaredNorm()) * p;
        r = r_new;
        out.push_back(inst.grad(x).norm());
    }
    return out;
}

// Coarse-to-fine grid minimisation of ||grad f|| over x supported on the first k coordinates.
inline double grid_floor(const TridiagInstance& inst, int k) {
    const int n = static_cast<int>(inst.dim());
    auto obj = [&](const std::vector<double>& c) {
        Vec x = Vec::Zero(n);
        for (int i = 0; i < k; ++i) x(i) = c[static_cast<std::size_t>(i)];
        return inst.grad(x).norm();
    };
    std::vector<double> center(static_cast<std::size_t>(k), 0.0);
    double half = 20.0;
    double best = obj(center);
    const int pts = 41;
    for (int level = 0; level < 40; ++level) {
        std::vector<double> best_c = center;
        std::vector<int> idx(static_cast<std::size_t>(k), 0);
        while (true) {
            std::vector<double> c(static_cast<std::size_t>(k));
            for (int i = 0; i < k; ++i)
                c[static_cast<std::size_t>(i)] =
                    center[static_cast<std::size_t>(i)] + half * (2.0 * idx[static_cast<std::size_t>(i)] / (pts - 1) - 1.0);
            const double val = obj(c);
            if (val < best) {
                best = val;
                best_c = c;
            }
            int j = 0;
            while (j < k && ++idx[static_cast<std::size_t>(j)] == pts) idx[static_cast<std::size_t>(j++)] = 0;
            if (j == k) break;
        }
        center = best_c;
        half *= 0.5;
    }
    return best;
}

}  // namespace msopt::testing
