#include "msopt/chebpoly.hpp"

#include "msopt/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace msopt {

double SignedLog::value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

double cheb_eval(long long d, double x) { return cheb_eval_log(d, x).value(); }

SignedLog cheb_eval_log(long long d, double x) {
    if (d < 0) throw ConfigError("negative Chebyshev degree");
    if (d == 0) return {0.0, 1};
    const double t = std::abs(x);
    if (t <= 1.0) {
        double prev = 1.0, cur = x;
        for (long long k = 1; k < d; ++k) {
            const double next = 2.0 * x * cur - prev;
            prev = cur;
            cur = next;
        }
        if (cur == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
        return {std::log(std::abs(cur)), cur > 0 ? 1 : -1};
    }
    // T_d(t) = (r^d + r^-d) / 2 with r = t + sqrt(t^2 - 1).
    const double lr = std::log1p((t - 1.0) + std::sqrt((t - 1.0) * (t + 1.0)));
    const double dl = static_cast<double>(d) * lr;
    const double log_abs = dl + std::log(0.5) + std::log1p(std::exp(-2.0 * dl));
    const int sign = (x < 0 && (d % 2 == 1)) ? -1 : 1;
    return {log_abs, sign};
}

DampingPoly damping_poly(double a, double b, long long d) {
    if (!(a > 0.0) || !(b > a) || !std::isfinite(b)) throw DegenerateIntervalError("damping polynomial needs 0 < a < b");
    if (d < 0) throw ConfigError("negative degree");
    return DampingPoly{a, b, d};
}

SignedLog DampingPoly::eval_log(double x) const {
    const double w = b - a;
    const SignedLog num = cheb_eval_log(d, (b + a - 2.0 * x) / w);
    const SignedLog den = cheb_eval_log(d, (b + a) / w);
    if (num.sign == 0) return num;
    return {num.log_abs - den.log_abs, num.sign * den.sign};
}

long long ProductPoly::degree() const {
    long long s = 0;
    for (const auto& f : factors) s += f.d;
    return s;
}

std::vector<long long> ProductPoly::degrees() const {
    std::vector<long long> d;
    for (const auto& f : factors) d.push_back(f.d);
    return d;
}

SignedLog ProductPoly::eval_log(double x) const {
    SignedLog r{0.0, 1};
    for (const auto& f : factors) {
        const SignedLog v = f.eval_log(x);
        if (v.sign == 0) return v;
        r.log_abs += v.log_abs;
        r.sign *= v.sign;
    }
    return r;
}

BandSpec enlarge_bands(const BandSpec& bands) {
    validate_bands(bands);
    BandSpec out;
    for (const auto& b : bands.bands) {
        const double mu = std::min(b.mu, 0.5 * b.L);
        if (!out.bands.empty() && mu <= out.bands.back().L)
            out.bands.back().L = b.L;
        else
            out.bands.push_back({mu, b.L});
    }
    return out;
}

ProductPoly product_poly(const BandSpec& bands, double eps) {
    if (!(eps > 0.0) || !(eps < 1.0)) throw InvalidToleranceError("eps must lie in (0, 1)");
    ProductPoly p;
    p.bands = enlarge_bands(bands);
    const double base = std::ceil(std::log(2.0 / eps));
    for (std::size_t j = 0; j < p.bands.m(); ++j) {
        const auto& b = p.bands[j];
        double inner = std::log(2.0 / eps);
        for (std::size_t i = 0; i < j; ++i)
            inner += static_cast<double>(p.factors[i].d) * std::log(8.0 * b.L / p.bands[i].L);
        const double c = j == 0 ? base : std::ceil(inner);
        const auto d = static_cast<long long>(std::ceil(std::sqrt(b.kappa()) * c));
        p.factors.push_back(damping_poly(b.mu, b.L, d));
    }
    return p;
}

double sup_norm_on_set_fn(double (*fn)(const void*, double), const void* ctx, long long degree,
                          const BandSpec& bands, int grid_per_band) {
    if (grid_per_band < 64) throw ConfigError("grid_per_band must be at least 64");
    long long n = std::max<long long>(grid_per_band, 4 * degree + 4);
    auto sweep = [&](long long pts) {
        double s = 0.0;
        for (const auto& b : bands.bands) {
            const double c = 0.5 * (b.mu + b.L), h = 0.5 * (b.L - b.mu);
            for (long long k = 0; k < pts; ++k) {
                const double x = c + h * std::cos(std::numbers::pi * static_cast<double>(k) / (pts - 1));
                s = std::max(s, std::abs(fn(ctx, x)));
            }
        }
        return s;
    };
    double prev = sweep(n);
    for (int it = 0; it < 6; ++it) {
        n *= 4;
        const double cur = sweep(n);
        const double change = std::abs(cur - prev) / std::max(cur, std::numeric_limits<double>::min());
        prev = std::max(prev, cur);
        if (change < 0.01) break;
    }
    return prev;
}

double green_bound(const BandSpec& bands) {
    validate_bands(bands);
    double den = std::sqrt(bands.kappa_product());
    for (std::size_t i = 0; i < bands.m(); ++i)
        if (bands.kappa(i) < 2.0) throw HypothesisError("green_bound requires every kappa_i >= 2");
    for (std::size_t i = 0; i + 1 < bands.m(); ++i) den *= 0.03 * std::log(16.0 * bands[i + 1].mu / bands[i].L);
    return 8.0 / den;
}

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

template <class F>
double integrate(F f, double a, double b, double tol) {
    double err = 0.0;
    const double v = GK::integrate(f, a, b, 30, tol * 1e-2, &err);
    if (!std::isfinite(v) || err > std::max(std::sqrt(tol) * std::abs(v), 1e-300))
        throw ConvergenceError("quadrature did not converge");
    return v;
}

}  // namespace

GreenEstimate green_widom(const BandSpec& bands, double tol) {
    validate_bands(bands);
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    const std::size_t m = bands.m();
    std::vector<double> ends;
    for (const auto& b : bands.bands) {
        ends.push_back(b.mu);
        ends.push_back(b.L);
    }
    // |q(z)| over all endpoint factors except the two at indices skip1, skip2.
    auto rest = [&](double z, std::size_t s1, std::size_t s2) {
        double p = 1.0;
        for (std::size_t e = 0; e < ends.size(); ++e)
            if (e != s1 && e != s2) p *= std::abs(z - ends[e]);
        return p;
    };
    GreenEstimate g;
    g.roots.resize(m > 0 ? m - 1 : 0);
    for (std::size_t k = 0; k + 1 < m; ++k) g.roots[k] = 0.5 * (bands[k].L + bands[k + 1].mu);
    auto h_except = [&](double z, std::size_t k) {
        double p = 1.0;
        for (std::size_t j = 0; j < g.roots.size(); ++j)
            if (j != k) p *= z - g.roots[j];
        return p;
    };
    const double half_pi = 0.5 * std::numbers::pi;
    for (int sweep = 0; sweep < 2000 && m > 1; ++sweep) {
        double worst = 0.0;
        for (std::size_t k = 0; k + 1 < m; ++k) {
            const double lo = bands[k].L, hi = bands[k + 1].mu;
            const double c = 0.5 * (lo + hi), w = 0.5 * (hi - lo);
            const std::size_t s1 = 2 * k + 1, s2 = 2 * k + 2;
            auto weight = [&](double th) {
                const double z = c + w * std::sin(th);
                return h_except(z, k) / std::sqrt(rest(z, s1, s2));
            };
            const double A = integrate(weight, -half_pi, half_pi, tol);
            const double B = integrate([&](double th) { return (c + w * std::sin(th)) * weight(th); }, -half_pi,
                                       half_pi, tol);
            const double r = std::clamp(B / A, lo, hi);
            worst = std::max(worst, std::abs(r - g.roots[k]) / (hi - lo));
            g.roots[k] = r;
        }
        if (worst <= tol) break;
        if (sweep == 1999) throw ConvergenceError("root iteration did not converge");
    }
    const double mu1 = bands[0].mu;
    auto f0 = [&](double u) {
        const double z = mu1 * (1.0 - u * u);
        double h = 1.0;
        for (double r : g.roots) h *= z - r;
        return 2.0 * std::sqrt(mu1) * h / std::sqrt(rest(z, 0, ends.size()));
    };
    const double I = integrate(f0, 0.0, 1.0, tol);
    g.g_numeric = (m % 2 == 1) ? I : -I;
    g.rho = std::exp(-g.g_numeric);
    try {
        g.g_bound = green_bound(bands);
    } catch (const HypothesisError&) {
        g.g_bound = std::numeric_limits<double>::quiet_NaN();
    }
    return g;
}

double minimax_lower(const BandSpec& bands, long long k, double tol) {
    if (k < 0) throw ConfigError("k must be nonnegative");
    if (k == 0) return 1.0;
    return std::exp(-static_cast<double>(k) * green_widom(bands, tol).g_numeric);
}

}  // namespace msopt
