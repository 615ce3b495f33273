#include "msopt/trace.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace msopt {

std::string to_string(Status s) {
    switch (s) {
        case Status::completed: return "completed";
        case Status::converged: return "converged";
        case Status::diverged: return "diverged";
        case Status::budget_exceeded: return "budget_exceeded";
    }
    return "completed";
}

long long SolverTrace::queries_to_gap(double target) const {
    for (const auto& r : rows)
        if (r.f_gap <= target) return r.queries;
    return -1;
}

long long SolverTrace::queries_to_psi(double target) const {
    for (const auto& r : rows)
        if (r.psi <= target) return r.queries;
    return -1;
}

TraceRecorder::TraceRecorder(const RunOptions& opts, std::size_t m, bool stochastic) : opts_(opts) {
    trace_.m = m;
    trace_.stochastic = stochastic;
}

bool TraceRecorder::record(long long step, long long queries, const Vec& x, const Vec& v, bool force,
                           long long samples) {
    const bool due = force || trace_.rows.empty() || opts_.record_stride <= 1 ||
                     step % opts_.record_stride == 0;
    if (!due && !opts_.stop_gap) return false;
    if (!trace_.rows.empty() && trace_.rows.back().step == step && trace_.rows.back().queries == queries)
        return false;
    TraceRow row;
    row.step = step;
    row.queries = queries;
    row.samples = samples;
    if (opts_.problem) {
        const auto d = band_diagnostics(*opts_.problem, x, v);
        row.f_gap = 0.0;
        for (double e : d.err) row.f_gap += e;
        row.psi = d.psi_total();
        row.err = d.err;
        row.res = d.res;
        if (trace_.stochastic) row.dist_sq = (x - opts_.problem->x_star()).squaredNorm();
    } else {
        row.err.assign(trace_.m, std::numeric_limits<double>::quiet_NaN());
        row.res.assign(trace_.m, std::numeric_limits<double>::quiet_NaN());
    }
    const bool hit = opts_.stop_gap && row.f_gap <= *opts_.stop_gap;
    if (due || hit) trace_.rows.push_back(std::move(row));
    return hit;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trace_csv(std::ostream& os, const SolverTrace& t) {
    os << "step,queries,f_gap,psi";
    for (std::size_t i = 1; i <= t.m; ++i) os << ",err_" << i;
    for (std::size_t i = 1; i <= t.m; ++i) os << ",res_" << i;
    if (t.stochastic) os << ",samples_consumed,dist_sq";
    os << '\n';
    for (const auto& r : t.rows) {
        os << r.step << ',' << r.queries << ',' << format_number(r.f_gap) << ',' << format_number(r.psi);
        for (std::size_t i = 0; i < t.m; ++i) os << ',' << format_number(i < r.err.size() ? r.err[i] : NAN);
        for (std::size_t i = 0; i < t.m; ++i) os << ',' << format_number(i < r.res.size() ? r.res[i] : NAN);
        if (t.stochastic) os << ',' << r.samples << ',' << format_number(r.dist_sq);
        os << '\n';
    }
}

std::string trace_csv(const SolverTrace& t) {
    std::ostringstream os;
    write_trace_csv(os, t);
    return os.str();
}

}  // namespace msopt
