#pragma once

#include "msopt/spectrum.hpp"

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace msopt {

enum class Status { completed, converged, diverged, budget_exceeded };

std::string to_string(Status s);

struct TraceRow {
    long long step = 0;
    long long queries = 0;
    double f_gap = std::numeric_limits<double>::quiet_NaN();
    double psi = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> err;
    std::vector<double> res;
    long long samples = 0;
    double dist_sq = std::numeric_limits<double>::quiet_NaN();
};

struct SolverTrace {
    std::size_t m = 0;
    bool stochastic = false;
    Status status = Status::completed;
    std::vector<TraceRow> rows;

    const TraceRow& last() const { return rows.back(); }
    double final_gap() const { return rows.back().f_gap; }
    double initial_gap() const { return rows.front().f_gap; }
    double final_relative_gap() const { return final_gap() / initial_gap(); }
    // Query count of the first row with f_gap <= target, or -1.
    long long queries_to_gap(double target) const;
    long long queries_to_psi(double target) const;
};

struct RunOptions {
    // Diagnostics source. Without it rows carry only step and query counts.
    const QuadraticProblem* problem = nullptr;
    long long record_stride = 1;
    std::optional<double> stop_gap;
    std::optional<long long> max_queries;
};

class TraceRecorder {
public:
    TraceRecorder(const RunOptions& opts, std::size_t m, bool stochastic = false);

    // Records a row if due. Returns true when the stop_gap target has been met.
    bool record(long long step, long long queries, const Vec& x, const Vec& v, bool force = false,
                long long samples = 0);
    void finish(Status s) { trace_.status = s; }
    SolverTrace take() { return std::move(trace_); }
    const SolverTrace& trace() const { return trace_; }
    const RunOptions& options() const { return opts_; }

private:
    RunOptions opts_;
    SolverTrace trace_;
    long long last_step_ = -1;
};

std::string format_number(double v);
void write_trace_csv(std::ostream& os, const SolverTrace& t);
std::string trace_csv(const SolverTrace& t);

}  // namespace msopt
