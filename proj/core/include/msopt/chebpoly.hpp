#pragma once

#include "msopt/spectrum.hpp"

#include <vector>

namespace msopt {

// Chebyshev polynomial of the first kind.
double cheb_eval(long long d, double x);

// |T_d(x)| as (log magnitude, sign). log is -inf when T_d(x) = 0.
struct SignedLog {
    double log_abs = 0.0;
    int sign = 1;
    double value() const;
};
SignedLog cheb_eval_log(long long d, double x);

// T_d(l(x)) / T_d(l(0)) with l(x) = (b + a - 2x) / (b - a).
struct DampingPoly {
    double a = 1.0;
    double b = 2.0;
    long long d = 0;

    SignedLog eval_log(double x) const;
    double operator()(double x) const { return eval_log(x).value(); }
};

DampingPoly damping_poly(double a, double b, long long d);

struct ProductPoly {
    std::vector<DampingPoly> factors;
    BandSpec bands;  // bands after enlargement, the factor intervals

    long long degree() const;
    std::vector<long long> degrees() const;
    SignedLog eval_log(double x) const;
    double operator()(double x) const { return eval_log(x).value(); }
};

// Widens each band to condition number at least 2 by lowering mu, merging
// with the previous band when they meet. The result covers the input.
BandSpec enlarge_bands(const BandSpec& bands);

// Degrees d_1 = ceil(sqrt(k_1) ceil(log(2/eps))) and
// d_j = ceil(sqrt(k_j) ceil(log(2/eps) + sum_{i<j} d_i log(8 L_j / L_i))).
ProductPoly product_poly(const BandSpec& bands, double eps);

// Max |p| over Chebyshev-Lobatto points on each band, refined by 4x until the
// value moves by less than 1%. Starts at max(grid_per_band, 4 * degree + 4).
template <class Poly>
double sup_norm_on_set(const Poly& p, const BandSpec& bands, int grid_per_band = 64);

double sup_norm_on_set_fn(double (*fn)(const void*, double), const void* ctx, long long degree,
                          const BandSpec& bands, int grid_per_band);

// 8 / (sqrt(prod kappa_i) * prod_{i<m} 0.03 log(16 mu_{i+1} / L_i)).
double green_bound(const BandSpec& bands);

struct GreenEstimate {
    double g_numeric = 0.0;
    double g_bound = 0.0;  // NaN when some kappa_i < 2
    double rho = 1.0;      // exp(-g_numeric)
    std::vector<double> roots;
};

// Green's function of the band union at 0 through the Widom representation.
GreenEstimate green_widom(const BandSpec& bands, double tol = 1e-10);

// exp(-k g_S(0)), a lower bound on max |p| over the bands for p(0) = 1, deg p <= k.
double minimax_lower(const BandSpec& bands, long long k, double tol = 1e-10);

template <class Poly>
double sup_norm_on_set(const Poly& p, const BandSpec& bands, int grid_per_band) {
    long long degree = 0;
    if constexpr (requires { p.degree(); })
        degree = p.degree();
    else if constexpr (requires { p.d; })
        degree = p.d;
    return sup_norm_on_set_fn([](const void* c, double x) { return (*static_cast<const Poly*>(c))(x); }, &p,
                              degree, bands, grid_per_band);
}

}  // namespace msopt
