#include "msopt/solvers.hpp"

#include "msopt/errors.hpp"
#include "msopt/rng.hpp"

#include <algorithm>
#include <cmath>

namespace msopt {

std::string to_string(ScheduleFamily f) {
    switch (f) {
        case ScheduleFamily::bsls: return "bsls";
        case ScheduleFamily::acbsls: return "acbsls";
        case ScheduleFamily::stoch: return "stoch";
    }
    return "bsls";
}

long long ceil_count(double x) {
    const double c = std::ceil(x - 1e-12 * std::max(1.0, std::abs(x)));
    return std::max(1LL, static_cast<long long>(c));
}

namespace {

void check_tolerance(double start, double eps) {
    if (!(eps > 0.0) || !(start > eps) || !std::isfinite(start))
        throw InvalidToleranceError("tolerance must satisfy 0 < eps < initial gap");
}

}  // namespace

StepSchedule schedule_bsls(const BandSpec& bands, double gap0, double eps) {
    validate_bands(bands);
    check_tolerance(gap0, eps);
    StepSchedule s;
    s.family = ScheduleFamily::bsls;
    const double lk = std::log(bands.kappa_global());
    for (std::size_t i = 0; i < bands.m(); ++i) {
        const double k = bands.kappa(i);
        s.T.push_back(i == 0 ? ceil_count(k * std::log(gap0 / eps)) : ceil_count(k * (2.0 * lk + 1.0)));
    }
    return s;
}

StepSchedule schedule_acbsls(const BandSpec& bands, double psi0, double eps) {
    validate_bands(bands);
    check_tolerance(psi0, eps);
    StepSchedule s;
    s.family = ScheduleFamily::acbsls;
    const double growth = std::log(4.0 * std::pow(bands.kappa_global(), 4)) + 1.0;
    for (std::size_t i = 0; i < bands.m(); ++i) {
        const double rk = std::sqrt(bands.kappa(i));
        s.T.push_back(i == 0 ? ceil_count(rk * std::log(psi0 / eps)) : ceil_count(rk * growth));
    }
    return s;
}

long long bsls_query_count(const StepSchedule& s) {
    long long total = 0, prefix = 1;
    for (long long t : s.T) {
        total += t * prefix;
        prefix *= t + 1;
    }
    return total;
}

long long acbsls_query_count(const StepSchedule& s) {
    long long q = 0;
    for (std::size_t k = s.T.size(); k-- > 0;) q = s.T[k] * (1 + 2 * q);
    return q;
}

long long naive_acbsls_query_count(const StepSchedule& s) {
    long long q = 0;
    for (std::size_t k = s.T.size(); k-- > 0;) q = s.T[k] * (1 + q);
    return q;
}

Vec gd_step(Oracle& oracle, const Vec& x, double L) {
    if (!(L > 0.0) || !std::isfinite(L)) throw NonPositiveError("step parameter L must be positive and finite");
    Vec r = x - oracle.grad(x) / L;
    if (!r.allFinite()) throw NonFiniteError("gradient step produced a non-finite iterate");
    return r;
}

AgdState agd_step(Oracle& oracle, const AgdState& s, double L, double mu) {
    if (!(mu > 0.0) || !(mu <= L) || !std::isfinite(L))
        throw NonPositiveError("accelerated step requires 0 < mu <= L");
    const double rk = std::sqrt(L / mu);
    const double alpha = rk / (rk + 1.0);
    const double beta = 1.0 - 1.0 / rk;
    const Vec y = alpha * s.x + (1.0 - alpha) * s.v;
    const Vec g = oracle.grad(y);
    AgdState out;
    out.v = beta * s.v + (1.0 - beta) * (y - g / mu);
    out.x = y - g / L;
    if (!out.x.allFinite() || !out.v.allFinite())
        throw NonFiniteError("accelerated step produced a non-finite iterate");
    return out;
}

namespace {

struct Stop {
    Status status;
};

class Run {
public:
    Run(Oracle& o, const RunOptions& opts, std::size_t m)
        : oracle(o), rec(opts, m), base(o.queries()) {}

    long long queries() const { return oracle.queries() - base; }

    // Stops before a query that would exceed the budget.
    void before_query() {
        const auto& o = rec.options();
        if (o.max_queries && queries() >= *o.max_queries) throw Stop{Status::budget_exceeded};
    }

    Vec gd(const Vec& x, double L) {
        before_query();
        Vec r = gd_step(oracle, x, L);
        last_x = r;
        last_v = r;
        return r;
    }

    AgdState agd(const AgdState& s, double L, double mu) {
        before_query();
        AgdState r = agd_step(oracle, s, L, mu);
        last_x = r.x;
        last_v = r.v;
        return r;
    }

    void checkpoint(const Vec& x, const Vec& v, bool force = false) {
        ++step;
        if (rec.record(step, queries(), x, v, force)) {
            out_x = x;
            out_v = v;
            throw Stop{Status::converged};
        }
    }

    void start(const Vec& x, const Vec& v) {
        if (rec.record(0, 0, x, v, true)) {
            out_x = x;
            out_v = v;
            throw Stop{Status::converged};
        }
    }

    template <class F>
    SolveResult drive(const Vec& x0, const Vec& v0, F&& body) {
        out_x = last_x = x0;
        out_v = last_v = v0;
        Status status = Status::completed;
        try {
            start(x0, v0);
            AgdState s = body();
            out_x = s.x;
            out_v = s.v;
            if (rec.trace().rows.back().queries != queries()) checkpoint(s.x, s.v, true);
        } catch (const Stop& st) {
            status = st.status;
            if (status == Status::budget_exceeded) {
                out_x = last_x;
                out_v = last_v;
                rec.record(step + 1, queries(), last_x, last_v, true);
            }
        } catch (const NonFiniteError&) {
            status = Status::diverged;
            out_x = last_x;
            out_v = last_v;
        }
        rec.finish(status);
        return SolveResult{out_x, out_v, rec.take()};
    }

    Oracle& oracle;
    TraceRecorder rec;
    long long base;
    long long step = 0;
    Vec last_x, last_v, out_x, out_v;
};

void check_schedule(const BandSpec& bands, const Vec& x0, const StepSchedule& s, Oracle& oracle) {
    validate_bands(bands);
    if (s.m() != bands.m()) throw DimMismatchError("schedule length must equal the band count");
    for (long long t : s.T)
        if (t < 1) throw InvalidToleranceError("schedule entries must be at least 1");
    if (static_cast<std::size_t>(x0.size()) != oracle.dim()) throw DimMismatchError("x0 dimension mismatch");
}

}  // namespace

SolveResult bsls(Oracle& oracle, const BandSpec& bands, const Vec& x0, const StepSchedule& schedule,
                 const RunOptions& opts) {
    check_schedule(bands, x0, schedule, oracle);
    const std::size_t m = bands.m();
    Run run(oracle, opts, m);
    auto level = [&](auto&& self, std::size_t i, Vec x) -> Vec {
        for (long long t = 0; t < schedule.T[i]; ++t) {
            if (i + 1 < m) {
                x = self(self, i + 1, std::move(x));
                if (i == 0) run.checkpoint(x, x);
            }
            x = run.gd(x, bands[i].L);
            if (i == 0 && m == 1) run.checkpoint(x, x);
        }
        if (i + 1 < m) x = self(self, i + 1, std::move(x));
        return x;
    };
    return run.drive(x0, x0, [&] {
        Vec x = level(level, 0, x0);
        return AgdState{x, x};
    });
}

namespace {

SolveResult accelerated(Oracle& oracle, const BandSpec& bands, const Vec& x0, const Vec& v0,
                        const StepSchedule& schedule, const RunOptions& opts, bool branching) {
    check_schedule(bands, x0, schedule, oracle);
    if (v0.size() != x0.size()) throw DimMismatchError("v0 dimension mismatch");
    const std::size_t m = bands.m();
    Run run(oracle, opts, m);
    auto level = [&](auto&& self, std::size_t i, AgdState s) -> AgdState {
        for (long long t = 0; t < schedule.T[i]; ++t) {
            AgdState st = run.agd(s, bands[i].L, bands[i].mu);
            if (i + 1 < m) {
                if (branching) {
                    s.x = self(self, i + 1, AgdState{st.x, st.x}).x;
                    s.v = self(self, i + 1, AgdState{st.v, st.v}).v;
                } else {
                    s = self(self, i + 1, std::move(st));
                }
            } else {
                s = std::move(st);
            }
            if (i == 0) run.checkpoint(s.x, s.v);
        }
        return s;
    };
    return run.drive(x0, v0, [&] { return level(level, 0, AgdState{x0, v0}); });
}

}  // namespace

SolveResult acbsls(Oracle& oracle, const BandSpec& bands, const Vec& x0, const Vec& v0,
                   const StepSchedule& schedule, const RunOptions& opts) {
    return accelerated(oracle, bands, x0, v0, schedule, opts, true);
}

SolveResult naive_acbsls(Oracle& oracle, const BandSpec& bands, const Vec& x0, const Vec& v0,
                         const StepSchedule& schedule, const RunOptions& opts) {
    return accelerated(oracle, bands, x0, v0, schedule, opts, false);
}

SolverTrace gd_constant(Oracle& oracle, const Vec& x0, double L, long long steps, const RunOptions& opts) {
    Run run(oracle, opts, opts.problem ? opts.problem->m() : 0);
    return run
        .drive(x0, x0,
               [&] {
                   Vec x = x0;
                   for (long long k = 0; k < steps; ++k) {
                       x = run.gd(x, L);
                       run.checkpoint(x, x);
                   }
                   return AgdState{x, x};
               })
        .trace;
}

SolverTrace agd_baseline(Oracle& oracle, const Vec& x0, double mu1, double Lm, long long steps,
                         const RunOptions& opts) {
    Run run(oracle, opts, opts.problem ? opts.problem->m() : 0);
    return run
        .drive(x0, x0,
               [&] {
                   AgdState s{x0, x0};
                   for (long long k = 0; k < steps; ++k) {
                       s = run.agd(s, Lm, mu1);
                       run.checkpoint(s.x, s.v);
                   }
                   return s;
               })
        .trace;
}

SolverTrace gd_linesearch(const QuadraticProblem& p, const Vec& x0, long long steps, const RunOptions& opts) {
    QuadraticOracle oracle(p);
    RunOptions o = opts;
    if (!o.problem) o.problem = &p;
    Run run(oracle, o, p.m());
    bool converged = false;
    auto res = run.drive(x0, x0, [&] {
        Vec x = x0;
        for (long long k = 0; k < steps; ++k) {
            run.before_query();
            const Vec g = oracle.grad(x);
            const double gg = g.squaredNorm();
            if (gg == 0.0) {
                converged = true;
                break;
            }
            const double gAg = g.dot(p.A() * g);
            if (!(gAg > 0.0)) {
                converged = true;
                break;
            }
            x -= (gg / gAg) * g;
            if (!x.allFinite()) throw NonFiniteError("line search produced a non-finite iterate");
            run.last_x = run.last_v = x;
            run.checkpoint(x, x);
        }
        return AgdState{x, x};
    });
    if (converged && res.trace.status == Status::completed) res.trace.status = Status::converged;
    return res.trace;
}

SolverTrace cg(const QuadraticProblem& p, const Vec& x0, long long steps, double tol, const RunOptions& opts) {
    QuadraticOracle oracle(p);
    RunOptions o = opts;
    if (!o.problem) o.problem = &p;
    Run run(oracle, o, p.m());
    bool converged = false;
    auto res = run.drive(x0, x0, [&] {
        Vec x = x0;
        run.before_query();
        Vec r = -oracle.grad(x);
        const double r0 = r.norm();
        Vec pdir = r;
        double rr = r.squaredNorm();
        for (long long k = 0; k < steps; ++k) {
            if (std::sqrt(rr) <= tol * r0 || rr == 0.0) {
                converged = true;
                break;
            }
            run.before_query();
            const Vec Ap = p.A() * pdir;
            oracle.charge_query();
            const double pAp = pdir.dot(Ap);
            if (!(pAp > 0.0)) throw BreakdownError("conjugate gradient breakdown: p'Ap <= 0");
            const double a = rr / pAp;
            x += a * pdir;
            r -= a * Ap;
            const double rr_new = r.squaredNorm();
            pdir = r + (rr_new / rr) * pdir;
            rr = rr_new;
            if (!x.allFinite()) throw NonFiniteError("conjugate gradient produced a non-finite iterate");
            run.last_x = run.last_v = x;
            run.checkpoint(x, x);
        }
        return AgdState{x, x};
    });
    if (converged && res.trace.status == Status::completed) res.trace.status = Status::converged;
    return res.trace;
}

namespace {

// Gradient of one band's sub-objective; decomposition access is privileged.
class BandOracle : public Oracle {
public:
    BandOracle(const QuadraticProblem& p, std::size_t band) : p_(&p) {
        const auto& s = p.spectrum();
        std::vector<Eigen::Index> idx;
        for (std::size_t j = 0; j < s.dim(); ++j)
            if (s.band_of[j] == band) idx.push_back(static_cast<Eigen::Index>(j));
        Rb_.resize(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(p.dim()));
        lam_.resize(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) {
            Rb_.row(static_cast<Eigen::Index>(k)) = p.rotation().row(idx[k]);
            lam_(static_cast<Eigen::Index>(k)) = s.eigenvalues[static_cast<std::size_t>(idx[k])];
        }
    }
    std::size_t dim() const override { return p_->dim(); }
    double value(const Vec& x) const override { return p_->value(x); }
    double band_gap(const Vec& x) const {
        const Vec z = Rb_ * (x - p_->x_star());
        return 0.5 * z.dot(lam_.cwiseProduct(z));
    }

protected:
    Vec grad_impl(const Vec& x) const override {
        const Vec z = Rb_ * (x - p_->x_star());
        return Rb_.transpose() * lam_.cwiseProduct(z);
    }

private:
    const QuadraticProblem* p_;
    Mat Rb_;
    Vec lam_;
};

}  // namespace

SolverTrace decomposed_agd(const QuadraticProblem& p, const Vec& x0, double eps, const RunOptions& opts) {
    if (!(eps > 0.0)) throw InvalidToleranceError("eps must be positive");
    if (static_cast<std::size_t>(x0.size()) != p.dim()) throw DimMismatchError("x0 dimension mismatch");
    RunOptions o = opts;
    if (!o.problem) o.problem = &p;
    const auto& bands = p.bands();
    const std::size_t m = bands.m();
    // Queries are charged to a shared counter across the per-band runs.
    QuadraticOracle counter(p);
    Run run(counter, o, m);
    return run
        .drive(x0, x0,
               [&] {
                   AgdState s{x0, x0};
                   for (std::size_t i = 0; i < m; ++i) {
                       BandOracle bo(p, i);
                       const double gi = bo.band_gap(s.x);
                       const double ratio = 2.0 * gi * static_cast<double>(m) / eps;
                       const long long T =
                           ratio > 1.0 ? ceil_count(std::sqrt(bands.kappa(i)) * std::log(ratio)) : 0;
                       s.v = s.x;
                       for (long long k = 0; k < T; ++k) {
                           run.before_query();
                           s = agd_step(bo, s, bands[i].L, bands[i].mu);
                           counter.charge_query();
                           run.last_x = s.x;
                           run.last_v = s.v;
                           run.checkpoint(s.x, s.x);
                       }
                       s.v = s.x;
                   }
                   return s;
               })
        .trace;
}

std::vector<int> bsls_step_sequence(const StepSchedule& s) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(bsls_query_count(s)));
    const std::size_t m = s.m();
    auto level = [&](auto&& self, std::size_t i) -> void {
        for (long long t = 0; t < s.T[i]; ++t) {
            if (i + 1 < m) self(self, i + 1);
            out.push_back(static_cast<int>(i));
        }
        if (i + 1 < m) self(self, i + 1);
    };
    if (m > 0) level(level, 0);
    return out;
}

std::vector<int> reorder_steps(const StepSchedule& s, std::uint64_t seed) {
    auto seq = bsls_step_sequence(s);
    SplitMix64 rng(seed);
    for (std::size_t k = seq.size(); k > 1; --k) {
        const auto j = static_cast<std::size_t>(rng.next() % k);
        std::swap(seq[k - 1], seq[j]);
    }
    return seq;
}

SolverTrace run_flat(Oracle& oracle, const BandSpec& bands, const Vec& x0, const std::vector<int>& sequence,
                     const RunOptions& opts) {
    validate_bands(bands);
    for (int b : sequence)
        if (b < 0 || static_cast<std::size_t>(b) >= bands.m()) throw DimMismatchError("band index out of range");
    Run run(oracle, opts, bands.m());
    return run
        .drive(x0, x0,
               [&] {
                   Vec x = x0;
                   for (int b : sequence) {
                       x = run.gd(x, bands[static_cast<std::size_t>(b)].L);
                       run.checkpoint(x, x);
                   }
                   return AgdState{x, x};
               })
        .trace;
}

}  // namespace msopt
