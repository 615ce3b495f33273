#pragma once

#include "msopt/solvers.hpp"
#include "msopt/spectrum.hpp"
#include "msopt/trace.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace msopt {

struct PrecisionConfig {
    // Significand width including the leading bit; empty means native double.
    std::optional<int> bits;

    bool enabled() const { return bits.has_value(); }
    double delta() const;
};

PrecisionConfig parse_bits(std::string_view text);
std::string to_string(const PrecisionConfig& c);

// Nearest value with a p-bit significand, ties to even.
double round_sig(double x, int p);
Vec round_sig(const Vec& x, int p);
Vec apply_precision(const Vec& x, const PrecisionConfig& c);

Vec gd_step_rounded(Oracle& oracle, const Vec& x, double L, const PrecisionConfig& c);
AgdState agd_step_rounded(Oracle& oracle, const AgdState& s, double L, double mu, const PrecisionConfig& c);

enum class OrderingPreset { interleaved, big_first, little_first };

OrderingPreset parse_ordering(std::string_view name);
std::string to_string(OrderingPreset p);

struct OrderingPlan {
    std::string name;
    std::vector<long long> counts;  // steps per band
    std::vector<int> sequence;      // 0-based band index of each step
};

// Interleaved: each step of band i is followed by an equal share of the
// remaining steps of bands i+1..m, arranged recursively. For counts (20, 240)
// this is one big step followed by 12 little steps, twenty times.
OrderingPlan make_plan(OrderingPreset preset, const std::vector<long long>& counts);
OrderingPlan plan_from_sequence(std::string name, std::vector<int> sequence, std::size_t m);
// One 1-based band index per line; blank lines and '#' comments ignored.
OrderingPlan parse_plan(std::string_view text, std::size_t m);
void validate_plan(const OrderingPlan& plan, std::size_t m);

SolverTrace run_ordering(const QuadraticProblem& p, const OrderingPlan& plan, const PrecisionConfig& c,
                         const Vec& x0, const RunOptions& opts = {});

}  // namespace msopt
