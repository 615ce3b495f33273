#pragma once

#include "msopt/rng.hpp"
#include "msopt/solvers.hpp"
#include "msopt/spectrum.hpp"
#include "msopt/trace.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace msopt {

class Sampler {
public:
    virtual ~Sampler() = default;
    virtual std::size_t dim() const = 0;
    // One sample (a, b).
    virtual void draw(Vec& a, double& b) = 0;
    // Mini-batch gradient (1/n) sum (a'x - b) a over n fresh samples.
    virtual Vec batch_gradient(const Vec& x, long long n);
    long long consumed() const { return consumed_; }

protected:
    long long consumed_ = 0;
};

enum class SampleMode {
    per_sample,
    // Draws the batch second-moment matrix directly from its Wishart law
    // (Bartlett decomposition). Same distribution as per_sample for n >= d.
    wishart,
};

SampleMode parse_sample_mode(std::string_view name);
std::string to_string(SampleMode m);

// a ~ N(0, A) with A the problem's Hessian, b = a'x_star.
class GaussianSampler : public Sampler {
public:
    GaussianSampler(const QuadraticProblem& p, std::uint64_t seed, SampleMode mode = SampleMode::per_sample);

    std::size_t dim() const override { return p_->dim(); }
    void draw(Vec& a, double& b) override;
    Vec batch_gradient(const Vec& x, long long n) override;
    // (1/n) sum a a' over n fresh samples.
    Mat batch_moment(long long n);
    const QuadraticProblem& problem() const { return *p_; }

private:
    const QuadraticProblem* p_;
    SplitMix64 rng_;
    SampleMode mode_;
    Mat C_;  // A = C C'
};

// Cycles a_k = sqrt(d) A^{1/2} r_k over the eigenvectors r_k; any batch that
// is a multiple of d reproduces the exact gradient.
class SweepSampler : public Sampler {
public:
    explicit SweepSampler(const QuadraticProblem& p);
    std::size_t dim() const override { return p_->dim(); }
    void draw(Vec& a, double& b) override;

private:
    const QuadraticProblem* p_;
    Mat rows_;
    std::size_t next_ = 0;
};

struct StochConfig {
    long long n_avg = 1;
    StepSchedule schedule;
    double beta = 3.0;
    double delta(std::size_t max_multiplicity) const {
        return beta * static_cast<double>(max_multiplicity) / static_cast<double>(n_avg);
    }
};

enum class BatchScale { dimension, multiplicity };

// T_1 = ceil(kappa_1 log(9 dist0/eps)), T_i = 8 ceil(kappa_i log kappa) and
// n_avg = ceil(beta * D * m^2 * prod(T) * max(T)) with D = d or the max
// band multiplicity.
StochConfig schedule_stoch(const BandSpec& bands, double x0_dist_sq, double eps, double beta, std::size_t d,
                           std::size_t max_mult, BatchScale scale = BatchScale::dimension);

Vec gd_stoch_step(Sampler& sampler, const Vec& x, double L, long long n_avg);

// Same recursion as bsls with mini-batch steps. Rows carry samples consumed
// and the squared distance to x_star when a problem is attached.
SolveResult bsls_stoch(Sampler& sampler, const BandSpec& bands, const Vec& x0, const StochConfig& config,
                       const RunOptions& opts = {});

struct TrialResult {
    int trial = 0;
    std::uint64_t seed = 0;
    double final_dist_sq = 0.0;
};

std::vector<TrialResult> run_stoch_trials(const QuadraticProblem& p, const Vec& x0, const StochConfig& config,
                                          int trials, std::uint64_t base_seed, SampleMode mode);
void write_trials_csv(std::ostream& os, const std::vector<TrialResult>& trials);

// Residual-bound recursion over per-band bounds r.
class ResidualModel {
public:
    ResidualModel(BandSpec bands, double delta, StepSchedule schedule);

    std::size_t m() const { return bands_.m(); }
    double delta() const { return delta_; }
    // gamma_i = 1 - 1/(2 kappa_i)
    double gamma(std::size_t i) const;
    // Product over j >= i of (2 T_j + 1); 1 for i = m.
    double N(std::size_t i) const;
    double beta(const std::vector<double>& r) const;
    double lambda(const std::vector<double>& r) const;
    Mat U(std::size_t i) const;
    Mat V(std::size_t i, const std::vector<double>& r0) const;
    Mat W(std::size_t i, const std::vector<double>& r0) const;
    double threshold(std::size_t i, const std::vector<double>& r0) const;

    // r after every step, starting from all ones.
    std::vector<std::vector<double>> run() const;

private:
    std::vector<double> level(std::size_t i, std::vector<double> r,
                              std::vector<std::vector<double>>& out) const;

    BandSpec bands_;
    double delta_;
    StepSchedule schedule_;
};

std::vector<std::vector<double>> bsls_res(const BandSpec& bands, double delta, const StepSchedule& schedule);

// Monte-Carlo estimate of diag E[M M'] in the eigenbasis after every step of
// the bsls step sequence, M the product of (I - A_s / L) over mini-batch
// moment matrices A_s.
struct ResidualEstimate {
    std::vector<std::vector<double>> mean;    // [step][coordinate]
    std::vector<std::vector<double>> std_error;  // [step][coordinate]
};

ResidualEstimate estimate_residuals(const QuadraticProblem& p, const StepSchedule& schedule, long long n_avg,
                                    int trials, std::uint64_t seed, SampleMode mode = SampleMode::wishart);

}  // namespace msopt
