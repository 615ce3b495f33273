#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace msopt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Band {
    double mu = 1.0;
    double L = 1.0;
    double kappa() const { return L / mu; }
    bool operator==(const Band&) const = default;
};

struct BandSpec {
    std::vector<Band> bands;

    BandSpec() = default;
    BandSpec(std::initializer_list<Band> b) : bands(b) {}
    explicit BandSpec(std::vector<Band> b) : bands(std::move(b)) {}

    std::size_t m() const { return bands.size(); }
    const Band& operator[](std::size_t i) const { return bands[i]; }
    double kappa(std::size_t i) const { return bands[i].kappa(); }
    double kappa_global() const { return bands.back().L / bands.front().mu; }
    double kappa_product() const;
    double mu1() const { return bands.front().mu; }
    double Lm() const { return bands.back().L; }
};

// Throws OverlapError, NonPositiveError or OrderError.
void validate_bands(const BandSpec& bands);

enum class Placement { endpoints, uniform, log, seeded_random };

Placement parse_placement(std::string_view name);
std::string to_string(Placement p);

struct Spectrum {
    BandSpec bands;
    std::vector<double> eigenvalues;
    std::vector<std::size_t> band_of;

    std::size_t dim() const { return eigenvalues.size(); }
    std::vector<std::size_t> multiplicities() const;
    std::size_t max_multiplicity() const;
};

Spectrum make_spectrum(const BandSpec& bands, const std::vector<int>& per_band,
                       Placement placement = Placement::uniform, std::uint64_t seed = 0);

// Assigns each eigenvalue to the band containing it. Throws if one lies outside
// every band or a band ends up empty.
Spectrum spectrum_from_eigenvalues(const BandSpec& bands, std::vector<double> eigenvalues);

// Product of d Householder reflectors with seeded normal directions.
Mat householder_rotation(std::size_t d, std::uint64_t seed);

// f(x) = 1/2 x'Ax - b'x + c with A = R' diag(lambda) R and b = A x_star.
// grad and gap are evaluated in terms of x - x_star.
class QuadraticProblem {
public:
    QuadraticProblem(Spectrum spectrum, std::uint64_t seed,
                     std::optional<Vec> x_star = std::nullopt, double f_star = 0.0);
    QuadraticProblem(Spectrum spectrum, const Mat& rotation, const Vec& x_star,
                     double f_star = 0.0, std::uint64_t seed = 0);

    std::size_t dim() const { return static_cast<std::size_t>(A_.rows()); }
    std::size_t m() const { return spectrum_.bands.m(); }
    const Spectrum& spectrum() const { return spectrum_; }
    const BandSpec& bands() const { return spectrum_.bands; }
    std::uint64_t seed() const { return seed_; }
    const Mat& rotation() const { return R_; }
    const Mat& A() const { return A_; }
    const Vec& b() const { return b_; }
    const Vec& x_star() const { return x_star_; }
    double f_star() const { return f_star_; }

    double value(const Vec& x) const;
    double gap(const Vec& x) const;
    Vec grad(const Vec& x) const;
    // Coordinates of x - x_star in the eigenbasis.
    Vec eigen_coords(const Vec& x) const;

private:
    void build(const Mat& rotation);

    Spectrum spectrum_;
    std::uint64_t seed_ = 0;
    Mat R_;
    Mat A_;
    Vec b_;
    Vec x_star_;
    double f_star_ = 0.0;
};

class Oracle {
public:
    virtual ~Oracle() = default;
    virtual std::size_t dim() const = 0;
    virtual double value(const Vec& x) const = 0;
    Vec grad(const Vec& x) {
        ++queries_;
        return grad_impl(x);
    }
    long long queries() const { return queries_; }
    void reset_queries() { queries_ = 0; }
    // Counts work done outside grad(), e.g. a Hessian product on a quadratic.
    void charge_query() { ++queries_; }

protected:
    virtual Vec grad_impl(const Vec& x) const = 0;

private:
    long long queries_ = 0;
};

class QuadraticOracle : public Oracle {
public:
    explicit QuadraticOracle(const QuadraticProblem& p) : p_(&p) {}
    std::size_t dim() const override { return p_->dim(); }
    double value(const Vec& x) const override { return p_->value(x); }

protected:
    Vec grad_impl(const Vec& x) const override { return p_->grad(x); }

private:
    const QuadraticProblem* p_;
};

struct BandDiagnostics {
    std::vector<double> err;  // at x
    std::vector<double> res;  // at v
    std::vector<double> psi;  // err + res
    double psi_total() const;
};

BandDiagnostics band_diagnostics(const QuadraticProblem& p, const Vec& x, const Vec& v);
std::vector<double> band_err(const QuadraticProblem& p, const Vec& x);
std::vector<double> band_res(const QuadraticProblem& p, const Vec& x);

}  // namespace msopt
