#pragma once

#include "msopt/spectrum.hpp"
#include "msopt/trace.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace msopt {

enum class ScheduleFamily { bsls, acbsls, stoch };

struct StepSchedule {
    std::vector<long long> T;
    ScheduleFamily family = ScheduleFamily::bsls;

    std::size_t m() const { return T.size(); }
};

std::string to_string(ScheduleFamily f);

// Ceiling that ignores relative noise below 1e-12, so ceil(2 * log(e)) is 2.
long long ceil_count(double x);

StepSchedule schedule_bsls(const BandSpec& bands, double gap0, double eps);
StepSchedule schedule_acbsls(const BandSpec& bands, double psi0, double eps);

// Gradient queries used by one full run.
long long bsls_query_count(const StepSchedule& s);
long long acbsls_query_count(const StepSchedule& s);
long long naive_acbsls_query_count(const StepSchedule& s);

struct AgdState {
    Vec x;
    Vec v;
};

struct SolveResult {
    Vec x;
    Vec v;
    SolverTrace trace;
};

Vec gd_step(Oracle& oracle, const Vec& x, double L);
AgdState agd_step(Oracle& oracle, const AgdState& s, double L, double mu);

// Rows are taken at the outer checkpoints: the start, after each repaired
// outer iterate, and the final output.
SolveResult bsls(Oracle& oracle, const BandSpec& bands, const Vec& x0, const StepSchedule& schedule,
                 const RunOptions& opts = {});
SolveResult acbsls(Oracle& oracle, const BandSpec& bands, const Vec& x0, const Vec& v0,
                   const StepSchedule& schedule, const RunOptions& opts = {});
SolveResult naive_acbsls(Oracle& oracle, const BandSpec& bands, const Vec& x0, const Vec& v0,
                         const StepSchedule& schedule, const RunOptions& opts = {});

SolverTrace gd_constant(Oracle& oracle, const Vec& x0, double L, long long steps,
                        const RunOptions& opts = {});
SolverTrace agd_baseline(Oracle& oracle, const Vec& x0, double mu1, double Lm, long long steps,
                         const RunOptions& opts = {});
// Exact line search on a quadratic; one query per step.
SolverTrace gd_linesearch(const QuadraticProblem& p, const Vec& x0, long long steps,
                          const RunOptions& opts = {});
// Conjugate gradient on Ax = b. Row k holds the k-th iterate; one query per
// matrix product including the initial residual.
SolverTrace cg(const QuadraticProblem& p, const Vec& x0, long long steps, double tol,
               const RunOptions& opts = {});
// AGD on each band's sub-objective separately, each to eps/m.
SolverTrace decomposed_agd(const QuadraticProblem& p, const Vec& x0, double eps,
                           const RunOptions& opts = {});

// Band indices (0-based) of every gradient step of bsls, in execution order.
std::vector<int> bsls_step_sequence(const StepSchedule& s);
// Seeded uniform permutation of bsls_step_sequence.
std::vector<int> reorder_steps(const StepSchedule& s, std::uint64_t seed);
SolverTrace run_flat(Oracle& oracle, const BandSpec& bands, const Vec& x0, const std::vector<int>& sequence,
                     const RunOptions& opts = {});

}  // namespace msopt
