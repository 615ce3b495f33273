#pragma once

#include "msopt/precision.hpp"
#include "msopt/solvers.hpp"
#include "msopt/spectrum.hpp"
#include "msopt/trace.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace msopt {

struct ProblemSpec {
    std::vector<Band> bands;
    std::vector<int> per_band;
    Placement placement = Placement::uniform;
    std::uint64_t seed = 0;
    // Empty means a seeded unit vector.
    std::vector<double> x_star;

    bool operator==(const ProblemSpec&) const = default;
};

// solver is one of gd, linesearch, agd, cg, decomposed_agd, bsls, acbsls,
// naive_acbsls, ordering, reorder.
struct SolverSpec {
    std::string solver;
    std::string label;  // output file stem; defaults to solver
    // Schedule override; a 0 entry keeps the derived value.
    std::vector<long long> T;
    std::optional<long long> steps;
    std::optional<long long> max_queries;
    long long record_stride = 1;
    bool stop_at_target = false;
    // ordering: a preset name with per-band counts, or a plan file.
    std::string ordering;
    std::vector<long long> counts;
    std::string plan_file;
    std::uint64_t seed = 0;  // reorder
    std::optional<int> bits;
    bool expect_diverged = false;

    bool operator==(const SolverSpec&) const = default;
};

struct ExperimentConfig {
    std::string name = "experiment";
    ProblemSpec problem;
    // Target relative gap; the acbsls family uses it for the psi potential.
    double eps = 1e-6;
    // Empty means the origin.
    std::vector<double> x0;
    std::vector<SolverSpec> solvers;
    std::string output;

    bool operator==(const ExperimentConfig&) const = default;
};

// Throws ConfigError naming the line for syntax errors and the field path
// for schema errors.
ExperimentConfig parse_config(std::string_view json);
std::string serialize_config(const ExperimentConfig& c);

QuadraticProblem build_problem(const ProblemSpec& spec);
Vec initial_point(const ExperimentConfig& c, const QuadraticProblem& p);

std::string problem_to_json(const QuadraticProblem& p);
QuadraticProblem problem_from_json(std::string_view json);

struct RunRecord {
    std::string label;
    SolverTrace trace;
    StepSchedule schedule;  // empty for baselines
    bool expect_diverged = false;
    // False when the run diverged without being declared to.
    bool ok() const;
};

RunRecord run_solver(const QuadraticProblem& p, const SolverSpec& s, double eps, const Vec& x0);
std::vector<RunRecord> run_experiment(const ExperimentConfig& c);
// Writes <dir>/<label>.csv for each record. Returns the paths.
std::vector<std::string> write_traces(const std::vector<RunRecord>& runs, const std::string& dir);

ExperimentConfig fig1_config();
ExperimentConfig fig2_config();
ExperimentConfig fig3_config();
ExperimentConfig preset_config(std::string_view name);

// "1e-4:2e-4,1:10" -> bands.
BandSpec parse_bands(std::string_view text);
std::string format_bands(const BandSpec& b);

}  // namespace msopt
