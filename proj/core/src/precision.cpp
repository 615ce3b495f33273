#include "msopt/precision.hpp"

#include "msopt/errors.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <sstream>

namespace msopt {

double PrecisionConfig::delta() const { return bits ? std::ldexp(1.0, 1 - *bits) : std::ldexp(1.0, -52); }

PrecisionConfig parse_bits(std::string_view text) {
    PrecisionConfig c;
    if (text == "off" || text == "Off" || text == "OFF") return c;
    int p = 0;
    try {
        std::size_t used = 0;
        p = std::stoi(std::string(text), &used);
        if (used != text.size()) throw ConfigError("");
    } catch (const std::exception&) {
        throw ConfigError("--bits expects an integer or 'off', got '" + std::string(text) + "'");
    }
    if (p < 2) throw ConfigError("--bits must be at least 2");
    c.bits = p;
    return c;
}

std::string to_string(const PrecisionConfig& c) { return c.bits ? std::to_string(*c.bits) : "off"; }

double round_sig(double x, int p) {
    if (p < 2) throw ConfigError("significand width must be at least 2");
    if (x == 0.0 || !std::isfinite(x) || p >= 53) return x;
    int e = 0;
    const double f = std::frexp(x, &e);  // |f| in [0.5, 1)
    const double scaled = std::ldexp(f, p);
    const double r = std::nearbyint(scaled);  // default mode rounds ties to even
    return std::ldexp(r, e - p);
}

Vec round_sig(const Vec& x, int p) {
    Vec r(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) r(j) = round_sig(x(j), p);
    return r;
}

Vec apply_precision(const Vec& x, const PrecisionConfig& c) { return c.bits ? round_sig(x, *c.bits) : x; }

Vec gd_step_rounded(Oracle& oracle, const Vec& x, double L, const PrecisionConfig& c) {
    return apply_precision(gd_step(oracle, x, L), c);
}

AgdState agd_step_rounded(Oracle& oracle, const AgdState& s, double L, double mu, const PrecisionConfig& c) {
    AgdState r = agd_step(oracle, s, L, mu);
    return AgdState{apply_precision(r.x, c), apply_precision(r.v, c)};
}

OrderingPreset parse_ordering(std::string_view name) {
    if (name == "interleaved") return OrderingPreset::interleaved;
    if (name == "big_first") return OrderingPreset::big_first;
    if (name == "little_first") return OrderingPreset::little_first;
    throw ConfigError("unknown ordering '" + std::string(name) + "'");
}

std::string to_string(OrderingPreset p) {
    switch (p) {
        case OrderingPreset::interleaved: return "interleaved";
        case OrderingPreset::big_first: return "big_first";
        case OrderingPreset::little_first: return "little_first";
    }
    return "interleaved";
}

namespace {

void interleave(std::size_t i, const std::vector<long long>& counts, std::vector<int>& out) {
    const std::size_t m = counts.size();
    if (i == m) return;
    const long long k = counts[i];
    if (i + 1 == m || k == 0) {
        out.insert(out.end(), static_cast<std::size_t>(k), static_cast<int>(i));
        if (k == 0) interleave(i + 1, counts, out);
        return;
    }
    for (long long t = 0; t < k; ++t) {
        out.push_back(static_cast<int>(i));
        std::vector<long long> share(counts.size(), 0);
        for (std::size_t j = i + 1; j < m; ++j) share[j] = counts[j] * (t + 1) / k - counts[j] * t / k;
        interleave(i + 1, share, out);
    }
}

}  // namespace

OrderingPlan make_plan(OrderingPreset preset, const std::vector<long long>& counts) {
    for (long long c : counts)
        if (c < 0) throw ConfigError("step counts must be nonnegative");
    OrderingPlan plan;
    plan.name = to_string(preset);
    plan.counts = counts;
    switch (preset) {
        case OrderingPreset::interleaved: interleave(0, counts, plan.sequence); break;
        case OrderingPreset::big_first:
            for (std::size_t i = 0; i < counts.size(); ++i)
                plan.sequence.insert(plan.sequence.end(), static_cast<std::size_t>(counts[i]), static_cast<int>(i));
            break;
        case OrderingPreset::little_first:
            for (std::size_t i = counts.size(); i-- > 0;)
                plan.sequence.insert(plan.sequence.end(), static_cast<std::size_t>(counts[i]), static_cast<int>(i));
            break;
    }
    return plan;
}

OrderingPlan plan_from_sequence(std::string name, std::vector<int> sequence, std::size_t m) {
    OrderingPlan plan;
    plan.name = std::move(name);
    plan.counts.assign(m, 0);
    for (int b : sequence) {
        if (b < 0 || static_cast<std::size_t>(b) >= m) throw ConfigError("band index out of range in plan");
        ++plan.counts[static_cast<std::size_t>(b)];
    }
    plan.sequence = std::move(sequence);
    return plan;
}

OrderingPlan parse_plan(std::string_view text, std::size_t m) {
    std::vector<int> seq;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        const std::string tok = line.substr(first, last - first + 1);
        int b = 0;
        try {
            std::size_t used = 0;
            b = std::stoi(tok, &used);
            if (used != tok.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw ConfigError("plan line " + std::to_string(lineno) + ": expected a band index");
        }
        if (b < 1 || static_cast<std::size_t>(b) > m)
            throw ConfigError("plan line " + std::to_string(lineno) + ": band index out of range");
        seq.push_back(b - 1);
    }
    return plan_from_sequence("custom", std::move(seq), m);
}

void validate_plan(const OrderingPlan& plan, std::size_t m) {
    if (plan.counts.size() != m) throw ConfigError("plan counts must have one entry per band");
    std::vector<long long> c(m, 0);
    for (int b : plan.sequence) {
        if (b < 0 || static_cast<std::size_t>(b) >= m) throw ConfigError("band index out of range in plan");
        ++c[static_cast<std::size_t>(b)];
    }
    if (c != plan.counts) throw ConfigError("plan sequence does not match its declared step counts");
}

SolverTrace run_ordering(const QuadraticProblem& p, const OrderingPlan& plan, const PrecisionConfig& c,
                         const Vec& x0, const RunOptions& opts) {
    const auto& bands = p.bands();
    validate_plan(plan, bands.m());
    RunOptions o = opts;
    if (!o.problem) o.problem = &p;
    QuadraticOracle oracle(p);
    TraceRecorder rec(o, bands.m());
    Vec x = apply_precision(x0, c);
    rec.record(0, 0, x, x, true);
    Status status = Status::completed;
    long long step = 0;
    try {
        for (int b : plan.sequence) {
            if (o.max_queries && oracle.queries() >= *o.max_queries) {
                status = Status::budget_exceeded;
                rec.record(step, oracle.queries(), x, x, true);
                break;
            }
            x = gd_step_rounded(oracle, x, bands[static_cast<std::size_t>(b)].L, c);
            ++step;
            const bool last = step == static_cast<long long>(plan.sequence.size());
            if (rec.record(step, oracle.queries(), x, x, last)) {
                status = Status::converged;
                break;
            }
        }
    } catch (const NonFiniteError&) {
        status = Status::diverged;
    }
    rec.finish(status);
    return rec.take();
}

}  // namespace msopt
