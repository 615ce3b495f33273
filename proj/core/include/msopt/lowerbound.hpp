#pragma once

#include "msopt/spectrum.hpp"

#include <string>
#include <vector>

namespace msopt {

// f(x) = 1/2 x'Tx + R e_1'x with T = Q' diag(lambda) Q tridiagonal and Q e_1 = v.
struct TridiagInstance {
    Vec lambda;
    Vec v;
    Mat Q;
    Vec diag;  // main diagonal of T
    Vec sub;   // T(i+1, i)
    double R = 1.0;
    std::string weights = "unoptimized";

    std::size_t dim() const { return static_cast<std::size_t>(lambda.size()); }
    Mat T() const;
    Vec grad(const Vec& x) const;
};

TridiagInstance tridiag_from_weights(const Vec& lambda, const Vec& v, double R = 1.0);

// min ||grad f(x)|| over x supported on the first k coordinates, computed as
// R * min ||(1 + lambda q(lambda)) v|| over deg q <= k - 1.
double krylov_grad_floor(const TridiagInstance& inst, long long k);

// k + m Chebyshev-Lobatto eigenvalues spread over the bands, uniform weights.
TridiagInstance hard_instance(const BandSpec& bands, long long k, double R = 1.0);

}  // namespace msopt
