#include "msopt/search.hpp"

#include "msopt/errors.hpp"
#include "msopt/solvers.hpp"

#include <algorithm>
#include <cmath>

namespace msopt {

InnerSolver parse_inner(std::string_view name) {
    if (name == "bsls") return InnerSolver::bsls;
    if (name == "acbsls") return InnerSolver::acbsls;
    throw ConfigError("unknown inner solver '" + std::string(name) + "'");
}

std::string to_string(InnerSolver s) { return s == InnerSolver::acbsls ? "acbsls" : "bsls"; }

void validate_search_params(const SearchParams& p) {
    if (p.m < 1) throw ConfigError("m must be at least 1");
    if (!(p.mu1 > 0.0) || !(p.Lm >= p.mu1)) throw ConfigError("need 0 < mu1 <= Lm");
    if (!(p.pi_kappa >= 1.0)) throw ConfigError("pikappa must be at least 1");
    if (!(p.eps > 0.0)) throw InvalidToleranceError("eps must be positive");
}

BandSpec CandidateParams::bands() const {
    BandSpec b;
    for (std::size_t i = 0; i < m(); ++i) b.bands.push_back({std::ldexp(1.0, mu_log[i]), std::ldexp(1.0, L_log[i])});
    return b;
}

CandidateParams merge_overlapping(CandidateParams c) {
    std::size_t i = 0;
    while (i + 1 < c.m()) {
        if (c.L_log[i] >= c.mu_log[i + 1]) {
            c.L_log[i] = std::max(c.L_log[i], c.L_log[i + 1]);
            c.mu_log.erase(c.mu_log.begin() + static_cast<std::ptrdiff_t>(i + 1));
            c.L_log.erase(c.L_log.begin() + static_cast<std::ptrdiff_t>(i + 1));
        } else {
            ++i;
        }
    }
    return c;
}

int pi_kappa_log(const SearchParams& p) {
    return static_cast<int>(std::ceil(std::log2(p.pi_kappa))) + 4 * static_cast<int>(p.m);
}
int mu1_log(const SearchParams& p) { return static_cast<int>(std::floor(std::log2(p.mu1))); }
int Lm_log(const SearchParams& p) { return static_cast<int>(std::ceil(std::log2(p.Lm))); }

void for_each_candidate(const SearchParams& p, const std::function<bool(const CandidateParams&)>& fn) {
    validate_search_params(p);
    const std::size_t m = p.m;
    const int total = pi_kappa_log(p);
    const int lo = mu1_log(p), hi = Lm_log(p);
    std::vector<int> kap(m, 1), mu(m, lo);
    bool stop = false;
    auto mu_grid = [&](auto&& self, std::size_t i) -> void {
        if (stop) return;
        if (i == m) {
            CandidateParams c;
            c.mu_log = mu;
            c.L_log.resize(m);
            for (std::size_t k = 0; k < m; ++k) c.L_log[k] = mu[k] + kap[k];
            if (!fn(c)) stop = true;
            return;
        }
        for (int v = mu[i - 1]; v <= hi && !stop; ++v) {
            mu[i] = v;
            self(self, i + 1);
        }
    };
    auto comps = [&](auto&& self, std::size_t i, int left) -> void {
        if (stop) return;
        if (i + 1 == m) {
            kap[i] = left;
            mu[0] = lo;
            mu_grid(mu_grid, 1);
            return;
        }
        for (int k = 1; k <= left - static_cast<int>(m - i - 1) && !stop; ++k) {
            kap[i] = k;
            self(self, i + 1, left - k);
        }
    };
    if (total >= static_cast<int>(m)) comps(comps, 0, total);
}

std::vector<CandidateParams> enumerate_candidates(const SearchParams& p) {
    std::vector<CandidateParams> out;
    for_each_candidate(p, [&](const CandidateParams& c) {
        out.push_back(c);
        return true;
    });
    return out;
}

long long candidate_count(const SearchParams& p) {
    long long n = 0;
    for_each_candidate(p, [&](const CandidateParams&) {
        ++n;
        return true;
    });
    return n;
}

double inner_budget(const SearchParams& p, double gap0) {
    validate_search_params(p);
    const double pi_log = pi_kappa_log(p);
    const double pi_prime = std::exp2(pi_log);
    const double log_kmax = (Lm_log(p) - mu1_log(p) + pi_log) * std::log(2.0);
    const double m = static_cast<double>(p.m);
    const double c1 = std::max(0.0, std::log(gap0 / p.eps));
    if (p.inner == InnerSolver::bsls) return pi_prime * (c1 + 2.0) * std::pow(2.0 * log_kmax + 3.0, m - 1.0);
    const double ca = std::max(0.0, std::log(2.0 * gap0 / p.eps));
    const double ci = std::log(4.0) + 4.0 * log_kmax + 1.0;
    return std::sqrt(pi_prime) * (2.0 * ca + 3.0) * std::pow(2.0 * ci + 3.0, m - 1.0);
}

SearchResult search_with(const SearchParams& p, const Vec& x0, const GapFn& gap, const InnerFn& inner) {
    validate_search_params(p);
    SearchResult r;
    r.x = x0;
    r.gap = gap(x0);
    if (r.gap < p.eps) return r;
    long long index = 0;
    bool found = false;
    for_each_candidate(p, [&](const CandidateParams& raw) {
        const CandidateParams c = merge_overlapping(raw);
        ++r.candidates_tried;
        const InnerRun run = inner(c.bands());
        r.queries += run.queries;
        if (!run.diverged && run.x.allFinite()) {
            const double g = gap(run.x);
            if (g < p.eps) {
                r.x = run.x;
                r.gap = g;
                r.candidate = c;
                r.candidate_index = index;
                found = true;
                return false;
            }
        }
        ++index;
        return true;
    });
    if (!found) throw NotFound("no candidate reached the target after " + std::to_string(r.candidates_tried) + " runs");
    return r;
}

SearchResult search(Oracle& oracle, const SearchParams& p, const Vec& x0, const GapFn& gap) {
    validate_search_params(p);
    const double gap0 = gap(x0);
    InnerFn inner = [&](const BandSpec& bands) {
        InnerRun run;
        const long long q0 = oracle.queries();
        if (!(gap0 > p.eps)) {
            run.x = x0;
            return run;
        }
        SolveResult res;
        if (p.inner == InnerSolver::bsls) {
            res = bsls(oracle, bands, x0, schedule_bsls(bands, gap0, p.eps));
        } else {
            res = acbsls(oracle, bands, x0, x0, schedule_acbsls(bands, 2.0 * gap0, p.eps));
        }
        run.x = res.x;
        run.diverged = res.trace.status == Status::diverged;
        run.queries = oracle.queries() - q0;
        return run;
    };
    return search_with(p, x0, gap, inner);
}

SearchResult search(Oracle& oracle, const SearchParams& p, const Vec& x0, double f_star) {
    return search(oracle, p, x0, [&](const Vec& x) { return oracle.value(x) - f_star; });
}

EmpiricalObjective::EmpiricalObjective(Sampler& sampler, long long n) {
    if (n < 1) throw ConfigError("evaluation set must be nonempty");
    const auto d = static_cast<Eigen::Index>(sampler.dim());
    A_.resize(n, d);
    b_.resize(n);
    Vec a;
    double b = 0.0;
    for (long long k = 0; k < n; ++k) {
        sampler.draw(a, b);
        A_.row(k) = a.transpose();
        b_(k) = b;
    }
}

double EmpiricalObjective::operator()(const Vec& x) const {
    return 0.5 * (A_ * x - b_).squaredNorm() / static_cast<double>(b_.size());
}

SearchResult search_stoch(Sampler& sampler, const SearchParams& p, const Vec& x0, long long n_eval,
                          long long n_avg) {
    validate_search_params(p);
    if (n_avg < 1) throw ConfigError("batch size must be at least 1");
    const EmpiricalObjective fhat(sampler, n_eval);
    const double g0 = fhat(x0);
    InnerFn inner = [&](const BandSpec& bands) {
        InnerRun run;
        const double dist = 2.0 * g0 / bands.mu1();
        StochConfig cfg = schedule_stoch(bands, dist, p.eps, 3.0, sampler.dim(), sampler.dim());
        cfg.n_avg = n_avg;
        const auto res = bsls_stoch(sampler, bands, x0, cfg);
        run.x = res.x;
        run.diverged = res.trace.status == Status::diverged;
        run.queries = bsls_query_count(cfg.schedule);
        return run;
    };
    return search_with(p, x0, [&](const Vec& x) { return fhat(x); }, inner);
}

}  // namespace msopt
