#include "msopt/spectrum.hpp"

#include "msopt/errors.hpp"
#include "msopt/rng.hpp"

#include <algorithm>
#include <cmath>

namespace msopt {

double BandSpec::kappa_product() const {
    double p = 1.0;
    for (const auto& b : bands) p *= b.kappa();
    return p;
}

void validate_bands(const BandSpec& bands) {
    if (bands.m() == 0) throw EmptyBandError("band list is empty");
    for (std::size_t i = 0; i < bands.m(); ++i) {
        const auto& b = bands[i];
        if (!(b.mu > 0.0) || !std::isfinite(b.mu) || !std::isfinite(b.L))
            throw NonPositiveError("band " + std::to_string(i + 1) + ": mu must be positive and finite");
        if (b.mu > b.L) throw OrderError("band " + std::to_string(i + 1) + ": mu exceeds L");
        if (i + 1 < bands.m() && b.L >= bands[i + 1].mu)
            throw OverlapError("bands " + std::to_string(i + 1) + " and " + std::to_string(i + 2) +
                               " overlap");
    }
}

Placement parse_placement(std::string_view name) {
    if (name == "endpoints") return Placement::endpoints;
    if (name == "uniform") return Placement::uniform;
    if (name == "log") return Placement::log;
    if (name == "seeded-random" || name == "seeded_random") return Placement::seeded_random;
    throw ConfigError("unknown placement '" + std::string(name) + "'");
}

std::string to_string(Placement p) {
    switch (p) {
        case Placement::endpoints: return "endpoints";
        case Placement::uniform: return "uniform";
        case Placement::log: return "log";
        case Placement::seeded_random: return "seeded-random";
    }
    return "uniform";
}

std::vector<std::size_t> Spectrum::multiplicities() const {
    std::vector<std::size_t> c(bands.m(), 0);
    for (auto k : band_of) ++c[k];
    return c;
}

std::size_t Spectrum::max_multiplicity() const {
    const auto c = multiplicities();
    return c.empty() ? 0 : *std::max_element(c.begin(), c.end());
}

Spectrum make_spectrum(const BandSpec& bands, const std::vector<int>& per_band, Placement placement,
                       std::uint64_t seed) {
    validate_bands(bands);
    if (per_band.size() != bands.m())
        throw DimMismatchError("per-band counts must have one entry per band");
    SplitMix64 rng(seed);
    Spectrum s;
    s.bands = bands;
    for (std::size_t i = 0; i < bands.m(); ++i) {
        const int c = per_band[i];
        if (c < 1) throw EmptyBandError("band " + std::to_string(i + 1) + " needs at least one eigenvalue");
        const double mu = bands[i].mu, L = bands[i].L;
        std::vector<double> vals;
        vals.reserve(c);
        for (int j = 0; j < c; ++j) {
            const double t = c == 1 ? 0.0 : static_cast<double>(j) / (c - 1);
            double lam = mu;
            switch (placement) {
                case Placement::uniform: lam = mu + (L - mu) * t; break;
                case Placement::log: lam = mu * std::pow(L / mu, t); break;
                case Placement::endpoints: lam = (c > 1 && 2 * j >= c) ? L : mu; break;
                case Placement::seeded_random:
                    if (c > 1 && j == c - 1)
                        lam = L;
                    else if (j > 0)
                        lam = mu + (L - mu) * rng.uniform();
                    break;
            }
            vals.push_back(std::clamp(lam, mu, L));
        }
        std::sort(vals.begin(), vals.end());
        for (double v : vals) {
            s.eigenvalues.push_back(v);
            s.band_of.push_back(i);
        }
    }
    return s;
}

Spectrum spectrum_from_eigenvalues(const BandSpec& bands, std::vector<double> eigenvalues) {
    validate_bands(bands);
    Spectrum s;
    s.bands = bands;
    for (double lam : eigenvalues) {
        std::size_t k = bands.m();
        for (std::size_t i = 0; i < bands.m(); ++i)
            if (lam >= bands[i].mu && lam <= bands[i].L) k = i;
        if (k == bands.m()) throw OrderError("eigenvalue outside every band");
        s.eigenvalues.push_back(lam);
        s.band_of.push_back(k);
    }
    for (auto c : s.multiplicities())
        if (c == 0) throw EmptyBandError("a band holds no eigenvalue");
    return s;
}

Mat householder_rotation(std::size_t d, std::uint64_t seed) {
    SplitMix64 rng(seed);
    const auto n = static_cast<Eigen::Index>(d);
    Mat Q = Mat::Identity(n, n);
    for (std::size_t k = 0; k < d; ++k) {
        Vec u(n);
        for (Eigen::Index j = 0; j < n; ++j) u(j) = rng.normal();
        u.normalize();
        const Vec Qu = Q * u;
        Q.noalias() -= 2.0 * Qu * u.transpose();
    }
    return Q;
}

QuadraticProblem::QuadraticProblem(Spectrum spectrum, std::uint64_t seed, std::optional<Vec> x_star,
                                   double f_star)
    : spectrum_(std::move(spectrum)), seed_(seed), f_star_(f_star) {
    validate_bands(spectrum_.bands);
    const std::size_t d = spectrum_.dim();
    if (d == 0) throw EmptyBandError("empty spectrum");
    SplitMix64 root(seed);
    SplitMix64 rot_rng = root.split();
    SplitMix64 x_rng = root.split();
    if (x_star) {
        if (static_cast<std::size_t>(x_star->size()) != d)
            throw DimMismatchError("x_star dimension does not match the spectrum");
        x_star_ = *x_star;
    } else {
        x_star_.resize(static_cast<Eigen::Index>(d));
        for (Eigen::Index j = 0; j < x_star_.size(); ++j) x_star_(j) = x_rng.normal();
        x_star_.normalize();
    }
    build(householder_rotation(d, rot_rng.next()));
}

QuadraticProblem::QuadraticProblem(Spectrum spectrum, const Mat& rotation, const Vec& x_star,
                                   double f_star, std::uint64_t seed)
    : spectrum_(std::move(spectrum)), seed_(seed), x_star_(x_star), f_star_(f_star) {
    validate_bands(spectrum_.bands);
    const auto d = static_cast<Eigen::Index>(spectrum_.dim());
    if (rotation.rows() != d || rotation.cols() != d || x_star.size() != d)
        throw DimMismatchError("rotation or x_star dimension does not match the spectrum");
    build(rotation);
}

void QuadraticProblem::build(const Mat& rotation) {
    R_ = rotation;
    const Vec lam = Eigen::Map<const Vec>(spectrum_.eigenvalues.data(),
                                          static_cast<Eigen::Index>(spectrum_.eigenvalues.size()));
    A_ = R_.transpose() * lam.asDiagonal() * R_;
    A_ = 0.5 * (A_ + A_.transpose()).eval();
    b_ = A_ * x_star_;
}

Vec QuadraticProblem::eigen_coords(const Vec& x) const {
    if (x.size() != x_star_.size()) throw DimMismatchError("point dimension mismatch");
    return R_ * (x - x_star_);
}

double QuadraticProblem::gap(const Vec& x) const {
    const Vec z = eigen_coords(x);
    double s = 0.0;
    for (Eigen::Index j = 0; j < z.size(); ++j) s += spectrum_.eigenvalues[j] * z(j) * z(j);
    return 0.5 * s;
}

double QuadraticProblem::value(const Vec& x) const { return f_star_ + gap(x); }

Vec QuadraticProblem::grad(const Vec& x) const {
    if (x.size() != b_.size()) throw DimMismatchError("point dimension mismatch");
    return A_ * (x - x_star_);
}

double BandDiagnostics::psi_total() const {
    double s = 0.0;
    for (double v : psi) s += v;
    return s;
}

std::vector<double> band_err(const QuadraticProblem& p, const Vec& x) {
    const Vec z = p.eigen_coords(x);
    std::vector<double> e(p.m(), 0.0);
    const auto& s = p.spectrum();
    for (Eigen::Index j = 0; j < z.size(); ++j) e[s.band_of[j]] += 0.5 * s.eigenvalues[j] * z(j) * z(j);
    return e;
}

std::vector<double> band_res(const QuadraticProblem& p, const Vec& x) {
    const Vec z = p.eigen_coords(x);
    std::vector<double> r(p.m(), 0.0);
    const auto& s = p.spectrum();
    for (Eigen::Index j = 0; j < z.size(); ++j) r[s.band_of[j]] += z(j) * z(j);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] *= 0.5 * s.bands[i].mu;
    return r;
}

BandDiagnostics band_diagnostics(const QuadraticProblem& p, const Vec& x, const Vec& v) {
    if (x.size() != v.size()) throw DimMismatchError("x and v dimensions differ");
    BandDiagnostics d;
    d.err = band_err(p, x);
    d.res = band_res(p, v);
    d.psi.resize(d.err.size());
    for (std::size_t i = 0; i < d.err.size(); ++i) d.psi[i] = d.err[i] + d.res[i];
    return d;
}

}  // namespace msopt
