#include "msopt/stochastic.hpp"

#include "msopt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace msopt {

Vec Sampler::batch_gradient(const Vec& x, long long n) {
    if (n < 1) throw ConfigError("batch size must be at least 1");
    Vec g = Vec::Zero(x.size());
    Vec a(x.size());
    double b = 0.0;
    for (long long k = 0; k < n; ++k) {
        draw(a, b);
        g += (a.dot(x) - b) * a;
    }
    return g / static_cast<double>(n);
}

SampleMode parse_sample_mode(std::string_view name) {
    if (name == "per_sample" || name == "per-sample") return SampleMode::per_sample;
    if (name == "wishart") return SampleMode::wishart;
    throw ConfigError("unknown sample mode '" + std::string(name) + "'");
}

std::string to_string(SampleMode m) { return m == SampleMode::wishart ? "wishart" : "per_sample"; }

GaussianSampler::GaussianSampler(const QuadraticProblem& p, std::uint64_t seed, SampleMode mode)
    : p_(&p), rng_(seed), mode_(mode) {
    Vec root(static_cast<Eigen::Index>(p.dim()));
    for (Eigen::Index j = 0; j < root.size(); ++j) root(j) = std::sqrt(p.spectrum().eigenvalues[j]);
    C_ = p.rotation().transpose() * root.asDiagonal();
}

void GaussianSampler::draw(Vec& a, double& b) {
    Vec z(C_.cols());
    for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = rng_.normal();
    a = C_ * z;
    b = a.dot(p_->x_star());
    ++consumed_;
}

Mat GaussianSampler::batch_moment(long long n) {
    if (n < 1) throw ConfigError("batch size must be at least 1");
    const Eigen::Index d = C_.rows();
    if (mode_ == SampleMode::wishart && n >= d) {
        Mat B = Mat::Zero(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            B(i, i) = std::sqrt(rng_.chi_squared(static_cast<double>(n - i)));
            for (Eigen::Index j = 0; j < i; ++j) B(i, j) = rng_.normal();
        }
        const Mat CB = C_ * B;
        consumed_ += n;
        return (CB * CB.transpose()) / static_cast<double>(n);
    }
    Mat S = Mat::Zero(d, d);
    Vec a;
    double b = 0.0;
    for (long long k = 0; k < n; ++k) {
        draw(a, b);
        S.noalias() += a * a.transpose();
    }
    return S / static_cast<double>(n);
}

Vec GaussianSampler::batch_gradient(const Vec& x, long long n) {
    if (mode_ == SampleMode::wishart && n >= static_cast<long long>(dim()))
        return batch_moment(n) * (x - p_->x_star());
    return Sampler::batch_gradient(x, n);
}

SweepSampler::SweepSampler(const QuadraticProblem& p) : p_(&p) {
    const auto d = static_cast<Eigen::Index>(p.dim());
    rows_.resize(d, d);
    for (Eigen::Index k = 0; k < d; ++k)
        rows_.row(k) = std::sqrt(static_cast<double>(d) * p.spectrum().eigenvalues[k]) * p.rotation().row(k);
}

void SweepSampler::draw(Vec& a, double& b) {
    a = rows_.row(static_cast<Eigen::Index>(next_)).transpose();
    b = a.dot(p_->x_star());
    next_ = (next_ + 1) % p_->dim();
    ++consumed_;
}

StochConfig schedule_stoch(const BandSpec& bands, double x0_dist_sq, double eps, double beta, std::size_t d,
                           std::size_t max_mult, BatchScale scale) {
    validate_bands(bands);
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidToleranceError("eps must be positive");
    if (!(x0_dist_sq >= 0.0)) throw InvalidToleranceError("initial distance must be nonnegative");
    if (!(beta > 0.0)) throw ConfigError("kurtosis bound must be positive");
    StochConfig c;
    c.beta = beta;
    c.schedule.family = ScheduleFamily::stoch;
    const double lk = std::log(bands.kappa_global());
    for (std::size_t i = 0; i < bands.m(); ++i) {
        const double k = bands.kappa(i);
        if (i == 0) {
            const double ratio = 9.0 * x0_dist_sq / eps;
            c.schedule.T.push_back(ratio > 1.0 ? ceil_count(k * std::log(ratio)) : 1);
        } else {
            c.schedule.T.push_back(8 * ceil_count(k * lk));
        }
    }
    const double m = static_cast<double>(bands.m());
    const double D = static_cast<double>(scale == BatchScale::dimension ? d : max_mult);
    double prod = 1.0, mx = 0.0;
    for (long long t : c.schedule.T) {
        prod *= static_cast<double>(t);
        mx = std::max(mx, static_cast<double>(t));
    }
    c.n_avg = std::max(1LL, static_cast<long long>(std::ceil(beta * D * m * m * prod * mx)));
    return c;
}

Vec gd_stoch_step(Sampler& sampler, const Vec& x, double L, long long n_avg) {
    if (!(L > 0.0)) throw NonPositiveError("step parameter L must be positive");
    Vec r = x - sampler.batch_gradient(x, n_avg) / L;
    if (!r.allFinite()) throw NonFiniteError("stochastic step produced a non-finite iterate");
    return r;
}

SolveResult bsls_stoch(Sampler& sampler, const BandSpec& bands, const Vec& x0, const StochConfig& config,
                       const RunOptions& opts) {
    validate_bands(bands);
    const auto& sch = config.schedule;
    if (sch.m() != bands.m()) throw DimMismatchError("schedule length must equal the band count");
    if (config.n_avg < 1) throw ConfigError("batch size must be at least 1");
    if (static_cast<std::size_t>(x0.size()) != sampler.dim()) throw DimMismatchError("x0 dimension mismatch");
    const std::size_t m = bands.m();
    TraceRecorder rec(opts, m, true);
    const long long s0 = sampler.consumed();
    long long queries = 0, step = 0;
    Vec last = x0;
    auto checkpoint = [&](const Vec& x, bool force) {
        ++step;
        rec.record(step, queries, x, x, force, sampler.consumed() - s0);
    };
    auto level = [&](auto&& self, std::size_t i, Vec x) -> Vec {
        for (long long t = 0; t < sch.T[i]; ++t) {
            if (i + 1 < m) {
                x = self(self, i + 1, std::move(x));
                if (i == 0) checkpoint(x, false);
            }
            x = gd_stoch_step(sampler, x, bands[i].L, config.n_avg);
            ++queries;
            last = x;
            if (i == 0 && m == 1) checkpoint(x, false);
        }
        if (i + 1 < m) x = self(self, i + 1, std::move(x));
        return x;
    };
    rec.record(0, 0, x0, x0, true, 0);
    Status status = Status::completed;
    Vec x = x0;
    try {
        x = level(level, 0, x0);
        if (rec.trace().rows.back().queries != queries) checkpoint(x, true);
    } catch (const NonFiniteError&) {
        status = Status::diverged;
        x = last;
    }
    rec.finish(status);
    return SolveResult{x, x, rec.take()};
}

std::vector<TrialResult> run_stoch_trials(const QuadraticProblem& p, const Vec& x0, const StochConfig& config,
                                          int trials, std::uint64_t base_seed, SampleMode mode) {
    std::vector<TrialResult> out;
    for (int t = 0; t < trials; ++t) {
        TrialResult r;
        r.trial = t;
        r.seed = derive_seed(base_seed, static_cast<std::uint64_t>(t));
        GaussianSampler s(p, r.seed, mode);
        RunOptions o;
        o.record_stride = 1LL << 62;
        const auto res = bsls_stoch(s, p.bands(), x0, config, o);
        r.final_dist_sq = (res.x - p.x_star()).squaredNorm();
        out.push_back(r);
    }
    return out;
}

void write_trials_csv(std::ostream& os, const std::vector<TrialResult>& trials) {
    os << "trial,seed,final_dist_sq\n";
    for (const auto& t : trials) os << t.trial << ',' << t.seed << ',' << format_number(t.final_dist_sq) << '\n';
}

ResidualModel::ResidualModel(BandSpec bands, double delta, StepSchedule schedule)
    : bands_(std::move(bands)), delta_(delta), schedule_(std::move(schedule)) {
    validate_bands(bands_);
    if (!(delta_ >= 0.0)) throw ConfigError("delta must be nonnegative");
    if (schedule_.m() != bands_.m()) throw DimMismatchError("schedule length must equal the band count");
}

double ResidualModel::gamma(std::size_t i) const { return 1.0 - 1.0 / (2.0 * bands_.kappa(i)); }

double ResidualModel::N(std::size_t i) const {
    double n = 1.0;
    for (std::size_t j = i; j < m(); ++j) n *= 2.0 * static_cast<double>(schedule_.T[j]) + 1.0;
    return n;
}

double ResidualModel::beta(const std::vector<double>& r) const {
    double b = 0.0;
    for (std::size_t j = 0; j < m(); ++j)
        for (std::size_t k = 0; k < m(); ++k) {
            const double ratio = std::max(bands_[j].L / bands_[k].L, bands_[k].L / bands_[j].L);
            b = std::max(b, r[k] / (ratio * r[j]));
        }
    return b;
}

double ResidualModel::lambda(const std::vector<double>& r) const {
    return 1.0 + 3.0 * delta_ * static_cast<double>(m()) * beta(r);
}

Mat ResidualModel::U(std::size_t i) const {
    const auto n = static_cast<Eigen::Index>(m());
    const double eta = 1.0 / bands_[i].L;
    Mat u(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto& bj = bands_[static_cast<std::size_t>(j)];
            if (j == k) {
                const double a = 1.0 - eta * bj.mu, b = 1.0 - eta * bj.L;
                u(j, k) = std::max(a * a, b * b);
            } else {
                u(j, k) = delta_ * eta * eta * bj.L * bands_[static_cast<std::size_t>(k)].L;
            }
        }
    return u;
}

Mat ResidualModel::V(std::size_t i, const std::vector<double>& r0) const {
    const auto n = static_cast<Eigen::Index>(m());
    const auto ii = static_cast<Eigen::Index>(i);
    const double lam = lambda(r0);
    const double Np = N(i + 1);
    Mat v = Mat::Zero(n, n);
    for (Eigen::Index j = 0; j < ii; ++j) v(j, j) = std::pow(lam, Np);
    v(ii, ii) = gamma(i);
    for (Eigen::Index j = ii + 1; j < n; ++j)
        v(j, ii) = bands_[static_cast<std::size_t>(j)].L / bands_[i].L * std::pow(lam, Np + 1.0);
    return v;
}

Mat ResidualModel::W(std::size_t i, const std::vector<double>& r0) const {
    Mat w = V(i, r0);
    w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    return w;
}

double ResidualModel::threshold(std::size_t i, const std::vector<double>& r0) const {
    if (i == 0) return std::numeric_limits<double>::infinity();
    const double lam = lambda(r0);
    const double log_arg = -N(i + 1) * std::log(lam) + std::log(bands_[i - 1].L / bands_[i].L) +
                           std::log(r0[i - 1] / r0[i]);
    return log_arg / std::log(gamma(i));
}

namespace {

// Product that treats 0 * inf as 0.
std::vector<double> apply_bound(const Mat& M, const std::vector<double>& r) {
    std::vector<double> out(r.size(), 0.0);
    for (Eigen::Index j = 0; j < M.rows(); ++j)
        for (Eigen::Index k = 0; k < M.cols(); ++k) {
            const double a = M(j, k);
            if (a != 0.0) out[static_cast<std::size_t>(j)] += a * r[static_cast<std::size_t>(k)];
        }
    return out;
}

}  // namespace

std::vector<double> ResidualModel::level(std::size_t i, std::vector<double> r,
                                         std::vector<std::vector<double>>& out) const {
    const std::vector<double> r0 = r;
    const double thr = threshold(i, r0);
    const Mat u = U(i);
    const Mat v = V(i, r0);
    const Mat w = W(i, r0);
    for (long long t = 0; t < schedule_.T[i]; ++t) {
        std::vector<double> rt = i + 1 < m() ? level(i + 1, r, out) : r;
        const bool past = i >= 1 && static_cast<double>(t) > std::ceil(thr);
        const auto a = apply_bound(u, rt);
        const auto b = apply_bound(past ? w : v, rt);
        for (std::size_t j = 0; j < r.size(); ++j) r[j] = std::max(a[j], b[j]);
        out.push_back(r);
    }
    return i + 1 < m() ? level(i + 1, std::move(r), out) : r;
}

std::vector<std::vector<double>> ResidualModel::run() const {
    std::vector<std::vector<double>> out;
    out.emplace_back(m(), 1.0);
    level(0, out.front(), out);
    return out;
}

std::vector<std::vector<double>> bsls_res(const BandSpec& bands, double delta, const StepSchedule& schedule) {
    return ResidualModel(bands, delta, schedule).run();
}

ResidualEstimate estimate_residuals(const QuadraticProblem& p, const StepSchedule& schedule, long long n_avg,
                                    int trials, std::uint64_t seed, SampleMode mode) {
    if (trials < 2) throw ConfigError("need at least two trials");
    const auto seq = bsls_step_sequence(schedule);
    const auto d = static_cast<Eigen::Index>(p.dim());
    const std::size_t steps = seq.size() + 1;
    std::vector<std::vector<double>> sum(steps, std::vector<double>(static_cast<std::size_t>(d), 0.0));
    auto sumsq = sum;
    const Mat& R = p.rotation();
    for (int t = 0; t < trials; ++t) {
        GaussianSampler s(p, derive_seed(seed, static_cast<std::uint64_t>(t)), mode);
        Mat M = Mat::Identity(d, d);
        for (std::size_t k = 0; k < steps; ++k) {
            if (k > 0) {
                const Mat S = s.batch_moment(n_avg);
                M -= (S * M) / p.bands()[static_cast<std::size_t>(seq[k - 1])].L;
            }
            const Mat RM = R * M;
            for (Eigen::Index j = 0; j < d; ++j) {
                const double v = RM.row(j).squaredNorm();
                sum[k][static_cast<std::size_t>(j)] += v;
                sumsq[k][static_cast<std::size_t>(j)] += v * v;
            }
        }
    }
    ResidualEstimate e;
    const double n = trials;
    for (std::size_t k = 0; k < steps; ++k) {
        std::vector<double> mean(static_cast<std::size_t>(d)), se(static_cast<std::size_t>(d));
        for (std::size_t j = 0; j < mean.size(); ++j) {
            mean[j] = sum[k][j] / n;
            const double var = std::max(0.0, (sumsq[k][j] - n * mean[j] * mean[j]) / (n - 1.0));
            se[j] = std::sqrt(var / n);
        }
        e.mean.push_back(std::move(mean));
        e.std_error.push_back(std::move(se));
    }
    return e;
}

}  // namespace msopt
