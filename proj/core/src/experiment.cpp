#include "msopt/experiment.hpp"

#include "msopt/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace msopt {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    if (!j.is_object()) field_error(path, "expected an object");
    for (const auto& [k, _] : j.items())
        if (!allowed.count(k)) field_error(path + "." + k, "unknown field");
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) field_error(path, "expected a number");
    return j.get<double>();
}

long long as_integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) field_error(path, "expected an integer");
    return j.get<long long>();
}

std::uint64_t as_seed(const json& j, const std::string& path) {
    if (!j.is_number_unsigned()) field_error(path, "expected a nonnegative integer");
    return j.get<std::uint64_t>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) field_error(path, "expected a string");
    return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) field_error(path, "expected true or false");
    return j.get<bool>();
}

std::vector<double> as_numbers(const json& j, const std::string& path) {
    if (!j.is_array()) field_error(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<long long> as_integers(const json& j, const std::string& path) {
    if (!j.is_array()) field_error(path, "expected an array of integers");
    std::vector<long long> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_integer(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<Band> as_bands(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) field_error(path, "expected a nonempty array of [mu, L] pairs");
    std::vector<Band> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        const auto v = as_numbers(j[i], p);
        if (v.size() != 2) field_error(p, "expected [mu, L]");
        out.push_back({v[0], v[1]});
    }
    try {
        validate_bands(BandSpec(out));
    } catch (const InputError& e) {
        field_error(path, e.what());
    }
    return out;
}

template <class F>
auto wrap(const std::string& path, F f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const InputError& e) {
        field_error(path, e.what());
    }
}

ProblemSpec parse_problem(const json& j, const std::string& path) {
    check_keys(j, path, {"bands", "per_band", "placement", "seed", "x_star"});
    ProblemSpec s;
    if (!j.contains("bands")) field_error(path + ".bands", "missing");
    s.bands = as_bands(j["bands"], path + ".bands");
    if (j.contains("per_band")) {
        const auto& pb = j["per_band"];
        if (pb.is_number_integer()) {
            s.per_band.assign(s.bands.size(), static_cast<int>(as_integer(pb, path + ".per_band")));
        } else {
            for (long long c : as_integers(pb, path + ".per_band")) s.per_band.push_back(static_cast<int>(c));
        }
    } else {
        s.per_band.assign(s.bands.size(), 1);
    }
    if (s.per_band.size() != s.bands.size()) field_error(path + ".per_band", "needs one count per band");
    for (int c : s.per_band)
        if (c < 1) field_error(path + ".per_band", "counts must be at least 1");
    if (j.contains("placement"))
        s.placement = wrap(path + ".placement", [&] { return parse_placement(as_string(j["placement"], path + ".placement")); });
    if (j.contains("seed")) s.seed = as_seed(j["seed"], path + ".seed");
    if (j.contains("x_star")) {
        const auto& xs = j["x_star"];
        if (xs.is_string()) {
            if (xs.get<std::string>() != "seeded") field_error(path + ".x_star", "expected \"seeded\" or an array");
        } else {
            s.x_star = as_numbers(xs, path + ".x_star");
        }
    }
    return s;
}

const std::set<std::string>& solver_names() {
    static const std::set<std::string> names{"gd",   "linesearch",   "agd",      "cg",     "decomposed_agd",
                                             "bsls", "acbsls",       "naive_acbsls", "ordering", "reorder"};
    return names;
}

SolverSpec parse_solver(const json& j, const std::string& path) {
    check_keys(j, path,
               {"solver", "label", "T", "steps", "max_queries", "record_stride", "stop_at_target", "ordering", "counts",
                "plan_file", "seed", "bits", "expect_diverged"});
    SolverSpec s;
    if (!j.contains("solver")) field_error(path + ".solver", "missing");
    s.solver = as_string(j["solver"], path + ".solver");
    if (!solver_names().count(s.solver)) field_error(path + ".solver", "unknown solver '" + s.solver + "'");
    s.label = j.contains("label") ? as_string(j["label"], path + ".label") : s.solver;
    if (s.label.empty() || s.label.find_first_of("/\\") != std::string::npos)
        field_error(path + ".label", "must be a plain file stem");
    if (j.contains("T")) {
        s.T = as_integers(j["T"], path + ".T");
        for (long long t : s.T)
            if (t < 0) field_error(path + ".T", "entries must be nonnegative");
    }
    if (j.contains("steps")) {
        s.steps = as_integer(j["steps"], path + ".steps");
        if (*s.steps < 0) field_error(path + ".steps", "must be nonnegative");
    }
    if (j.contains("max_queries")) {
        s.max_queries = as_integer(j["max_queries"], path + ".max_queries");
        if (*s.max_queries < 0) field_error(path + ".max_queries", "must be nonnegative");
    }
    if (j.contains("record_stride")) {
        s.record_stride = as_integer(j["record_stride"], path + ".record_stride");
        if (s.record_stride < 1) field_error(path + ".record_stride", "must be at least 1");
    }
    if (j.contains("stop_at_target")) s.stop_at_target = as_bool(j["stop_at_target"], path + ".stop_at_target");
    if (j.contains("ordering")) {
        s.ordering = as_string(j["ordering"], path + ".ordering");
        wrap(path + ".ordering", [&] { return parse_ordering(s.ordering); });
    }
    if (j.contains("counts")) s.counts = as_integers(j["counts"], path + ".counts");
    if (j.contains("plan_file")) s.plan_file = as_string(j["plan_file"], path + ".plan_file");
    if (j.contains("seed")) s.seed = as_seed(j["seed"], path + ".seed");
    if (j.contains("bits")) {
        const auto& b = j["bits"];
        const std::string text = b.is_string() ? b.get<std::string>() : std::to_string(as_integer(b, path + ".bits"));
        s.bits = wrap(path + ".bits", [&] { return parse_bits(text).bits; });
    }
    if (j.contains("expect_diverged")) s.expect_diverged = as_bool(j["expect_diverged"], path + ".expect_diverged");
    if (s.solver == "ordering" && s.ordering.empty() && s.plan_file.empty())
        field_error(path + ".ordering", "ordering needs a preset or a plan_file");
    return s;
}

ojson bands_json(const std::vector<Band>& bands) {
    ojson a = ojson::array();
    for (const auto& b : bands) a.push_back(ojson::array({b.mu, b.L}));
    return a;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto pos = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n');
        throw ConfigError("line " + std::to_string(line) + ": invalid JSON");
    }
    check_keys(j, "config", {"name", "problem", "eps", "x0", "solvers", "output"});
    ExperimentConfig c;
    if (j.contains("name")) c.name = as_string(j["name"], "config.name");
    if (!j.contains("problem")) field_error("config.problem", "missing");
    c.problem = parse_problem(j["problem"], "config.problem");
    if (j.contains("eps")) {
        c.eps = as_number(j["eps"], "config.eps");
        if (!(c.eps > 0.0) || !(c.eps < 1.0)) field_error("config.eps", "must lie in (0, 1)");
    }
    if (j.contains("x0")) {
        const auto& x = j["x0"];
        if (x.is_string()) {
            if (x.get<std::string>() != "zero") field_error("config.x0", "expected \"zero\" or an array");
        } else {
            c.x0 = as_numbers(x, "config.x0");
        }
    }
    if (!j.contains("solvers") || !j["solvers"].is_array() || j["solvers"].empty())
        field_error("config.solvers", "expected a nonempty array");
    std::set<std::string> labels;
    for (std::size_t i = 0; i < j["solvers"].size(); ++i) {
        const std::string p = "config.solvers[" + std::to_string(i) + "]";
        c.solvers.push_back(parse_solver(j["solvers"][i], p));
        if (!labels.insert(c.solvers.back().label).second) field_error(p + ".label", "duplicate label");
    }
    if (j.contains("output")) c.output = as_string(j["output"], "config.output");
    return c;
}

std::string serialize_config(const ExperimentConfig& c) {
    ojson j;
    j["name"] = c.name;
    ojson p;
    p["bands"] = bands_json(c.problem.bands);
    p["per_band"] = c.problem.per_band;
    p["placement"] = to_string(c.problem.placement);
    p["seed"] = c.problem.seed;
    if (c.problem.x_star.empty())
        p["x_star"] = "seeded";
    else
        p["x_star"] = c.problem.x_star;
    j["problem"] = p;
    j["eps"] = c.eps;
    if (c.x0.empty())
        j["x0"] = "zero";
    else
        j["x0"] = c.x0;
    ojson solvers = ojson::array();
    for (const auto& s : c.solvers) {
        ojson o;
        o["solver"] = s.solver;
        o["label"] = s.label;
        if (!s.T.empty()) o["T"] = s.T;
        if (s.steps) o["steps"] = *s.steps;
        if (s.max_queries) o["max_queries"] = *s.max_queries;
        if (s.record_stride != 1) o["record_stride"] = s.record_stride;
        if (s.stop_at_target) o["stop_at_target"] = true;
        if (!s.ordering.empty()) o["ordering"] = s.ordering;
        if (!s.counts.empty()) o["counts"] = s.counts;
        if (!s.plan_file.empty()) o["plan_file"] = s.plan_file;
        if (s.seed != 0) o["seed"] = s.seed;
        if (s.bits) o["bits"] = *s.bits;
        if (s.expect_diverged) o["expect_diverged"] = true;
        solvers.push_back(o);
    }
    j["solvers"] = solvers;
    if (!c.output.empty()) j["output"] = c.output;
    return j.dump(2) + "\n";
}

QuadraticProblem build_problem(const ProblemSpec& spec) {
    const BandSpec bands(spec.bands);
    Spectrum s = make_spectrum(bands, spec.per_band, spec.placement, spec.seed);
    if (spec.x_star.empty()) return QuadraticProblem(std::move(s), spec.seed);
    if (spec.x_star.size() != s.dim()) throw DimMismatchError("x_star length differs from the eigenvalue count");
    const Vec xs = Eigen::Map<const Vec>(spec.x_star.data(), static_cast<Eigen::Index>(spec.x_star.size()));
    return QuadraticProblem(std::move(s), spec.seed, xs);
}

Vec initial_point(const ExperimentConfig& c, const QuadraticProblem& p) {
    if (c.x0.empty()) return Vec::Zero(static_cast<Eigen::Index>(p.dim()));
    if (c.x0.size() != p.dim()) throw DimMismatchError("x0 length differs from the problem dimension");
    return Eigen::Map<const Vec>(c.x0.data(), static_cast<Eigen::Index>(c.x0.size()));
}

std::string problem_to_json(const QuadraticProblem& p) {
    ojson j;
    j["dim"] = p.dim();
    j["bands"] = bands_json(p.bands().bands);
    j["eigenvalues"] = p.spectrum().eigenvalues;
    j["seed"] = p.seed();
    j["x_star"] = std::vector<double>(p.x_star().data(), p.x_star().data() + p.x_star().size());
    j["f_star"] = p.f_star();
    return j.dump(2) + "\n";
}

QuadraticProblem problem_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error&) {
        throw ConfigError("problem: invalid JSON");
    }
    check_keys(j, "problem", {"dim", "bands", "eigenvalues", "seed", "x_star", "f_star"});
    for (const char* k : {"dim", "bands", "eigenvalues", "seed", "x_star", "f_star"})
        if (!j.contains(k)) field_error(std::string("problem.") + k, "missing");
    const auto dim = as_integer(j["dim"], "problem.dim");
    const BandSpec bands(as_bands(j["bands"], "problem.bands"));
    const auto eig = as_numbers(j["eigenvalues"], "problem.eigenvalues");
    const auto xs = as_numbers(j["x_star"], "problem.x_star");
    if (static_cast<long long>(eig.size()) != dim || static_cast<long long>(xs.size()) != dim)
        throw DimMismatchError("problem: eigenvalues and x_star must have dim entries");
    Spectrum s = spectrum_from_eigenvalues(bands, eig);
    const Vec x = Eigen::Map<const Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    return QuadraticProblem(std::move(s), as_seed(j["seed"], "problem.seed"), x, as_number(j["f_star"], "problem.f_star"));
}

bool RunRecord::ok() const { return trace.status != Status::diverged || expect_diverged; }

namespace {

StepSchedule with_override(StepSchedule s, const std::vector<long long>& T, const std::string& label) {
    if (T.empty()) return s;
    if (T.size() != s.T.size()) throw ConfigError(label + ".T: needs one entry per band");
    for (std::size_t i = 0; i < T.size(); ++i)
        if (T[i] > 0) s.T[i] = T[i];
    return s;
}

long long default_steps(const std::string& solver, const BandSpec& b, double eps, std::size_t d) {
    const double k = b.kappa_global();
    if (solver == "agd") return ceil_count(std::sqrt(k) * std::log(2.0 / eps));
    if (solver == "cg") return static_cast<long long>(d);
    return ceil_count(k * std::log(1.0 / eps));
}

}  // namespace

RunRecord run_solver(const QuadraticProblem& p, const SolverSpec& s, double eps, const Vec& x0) {
    if (x0.size() != static_cast<Eigen::Index>(p.dim())) throw DimMismatchError("x0 has the wrong dimension");
    const BandSpec& bands = p.bands();
    const std::size_t m = bands.m();
    const double gap0 = p.gap(x0);
    RunOptions opts;
    opts.problem = &p;
    opts.record_stride = s.record_stride;
    opts.max_queries = s.max_queries;
    if (s.stop_at_target) opts.stop_gap = eps * gap0;
    const PrecisionConfig prec{s.bits};
    const long long steps = s.steps.value_or(default_steps(s.solver, bands, eps, p.dim()));
    const std::string where = "solver '" + s.label + "'";
    auto no_bits = [&] {
        if (prec.enabled()) throw ConfigError(where + ".bits: not supported for " + s.solver);
    };

    RunRecord r;
    r.label = s.label;
    r.expect_diverged = s.expect_diverged;
    QuadraticOracle o(p);
    if (s.solver == "gd") {
        if (prec.enabled()) {
            r.trace = run_ordering(p, plan_from_sequence("gd", std::vector<int>(steps, static_cast<int>(m - 1)), m),
                                   prec, x0, opts);
        } else {
            r.trace = gd_constant(o, x0, bands.Lm(), steps, opts);
        }
    } else if (s.solver == "linesearch") {
        no_bits();
        r.trace = gd_linesearch(p, x0, steps, opts);
    } else if (s.solver == "agd") {
        no_bits();
        r.trace = agd_baseline(o, x0, bands.mu1(), bands.Lm(), steps, opts);
    } else if (s.solver == "cg") {
        no_bits();
        r.trace = cg(p, x0, steps, 0.0, opts);
    } else if (s.solver == "decomposed_agd") {
        no_bits();
        r.trace = decomposed_agd(p, x0, eps * gap0, opts);
    } else if (s.solver == "bsls" || s.solver == "reorder") {
        r.schedule = with_override(schedule_bsls(bands, gap0, eps * gap0), s.T, where);
        std::vector<int> seq;
        if (s.solver == "reorder") seq = reorder_steps(r.schedule, s.seed);
        if (prec.enabled()) {
            if (seq.empty()) seq = bsls_step_sequence(r.schedule);
            r.trace = run_ordering(p, plan_from_sequence(s.solver, seq, m), prec, x0, opts);
        } else if (s.solver == "reorder") {
            r.trace = run_flat(o, bands, x0, seq, opts);
        } else {
            r.trace = bsls(o, bands, x0, r.schedule, opts).trace;
        }
    } else if (s.solver == "acbsls" || s.solver == "naive_acbsls") {
        no_bits();
        const double psi0 = band_diagnostics(p, x0, x0).psi_total();
        r.schedule = with_override(schedule_acbsls(bands, psi0, eps * psi0), s.T, where);
        r.trace = s.solver == "acbsls" ? acbsls(o, bands, x0, x0, r.schedule, opts).trace
                                       : naive_acbsls(o, bands, x0, x0, r.schedule, opts).trace;
    } else if (s.solver == "ordering") {
        OrderingPlan plan = !s.plan_file.empty() ? parse_plan(read_file(s.plan_file), m)
                                                 : make_plan(parse_ordering(s.ordering), s.counts);
        validate_plan(plan, m);
        r.trace = run_ordering(p, plan, prec, x0, opts);
    } else {
        throw ConfigError(where + ": unknown solver");
    }
    return r;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& c) {
    const QuadraticProblem p = build_problem(c.problem);
    const Vec x0 = initial_point(c, p);
    std::vector<RunRecord> out;
    for (const auto& s : c.solvers) out.push_back(run_solver(p, s, c.eps, x0));
    return out;
}

std::vector<std::string> write_traces(const std::vector<RunRecord>& runs, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError(dir + ": cannot create directory");
    std::vector<std::string> paths;
    for (const auto& r : runs) {
        const auto path = (fs::path(dir) / (r.label + ".csv")).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ConfigError(path + ": cannot write");
        write_trace_csv(out, r.trace);
        paths.push_back(path);
    }
    return paths;
}

namespace {

SolverSpec solver_spec(std::string solver, std::string label, std::vector<long long> T = {}) {
    SolverSpec s;
    s.solver = std::move(solver);
    s.label = std::move(label);
    s.T = std::move(T);
    return s;
}

}  // namespace

ExperimentConfig fig1_config() {
    ExperimentConfig c;
    c.name = "fig1";
    c.problem.bands = {{1e-4, 2e-4}, {1.0, 10.0}};
    c.problem.per_band = {10, 10};
    c.problem.seed = 1;
    c.eps = 1e-8;
    c.output = "fig1";
    SolverSpec gd = solver_spec("gd", "gd");
    gd.steps = 2000000;
    gd.record_stride = 1000;
    gd.stop_at_target = true;
    SolverSpec ls = gd;
    ls.solver = ls.label = "linesearch";
    SolverSpec agd = solver_spec("agd", "agd");
    agd.steps = 20000;
    agd.record_stride = 10;
    agd.stop_at_target = true;
    SolverSpec b = solver_spec("bsls", "bsls");
    b.stop_at_target = true;
    SolverSpec ac = solver_spec("acbsls", "acbsls");
    ac.stop_at_target = true;
    c.solvers = {gd, ls, agd, b, ac};
    return c;
}

ExperimentConfig fig2_config() {
    ExperimentConfig c;
    c.name = "fig2";
    c.problem.bands = {{0.001, 0.002}, {0.5, 1.0}};
    c.problem.per_band = {10, 10};
    c.problem.seed = 1;
    c.eps = 1e-6;
    c.output = "fig2";
    for (const std::string name : {"interleaved", "big_first", "little_first"}) {
        SolverSpec s = solver_spec("ordering", name);
        s.ordering = name;
        s.counts = {20, 240};
        s.expect_diverged = name != "interleaved";
        c.solvers.push_back(s);
    }
    return c;
}

ExperimentConfig fig3_config() {
    ExperimentConfig c;
    c.name = "fig3";
    c.problem.bands = {{1e-4, 1e-3}, {0.5, 1.0}};
    c.problem.per_band = {10, 10};
    c.problem.seed = 1;
    c.eps = 1e-6;
    c.output = "fig3";
    c.solvers.push_back(solver_spec("acbsls", "acbsls_t8", {0, 8}));
    for (long long t2 : {8, 16, 32, 64}) {
        SolverSpec s = solver_spec("naive_acbsls", "naive_t" + std::to_string(t2), {0, t2});
        s.expect_diverged = true;
        c.solvers.push_back(s);
    }
    return c;
}

ExperimentConfig preset_config(std::string_view name) {
    if (name == "fig1") return fig1_config();
    if (name == "fig2") return fig2_config();
    if (name == "fig3") return fig3_config();
    throw ConfigError("unknown preset '" + std::string(name) + "'");
}

BandSpec parse_bands(std::string_view text) {
    std::vector<Band> out;
    std::string s(text);
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("bands: expected mu:L, got '" + item + "'");
        try {
            std::size_t used = 0;
            const double mu = std::stod(item.substr(0, colon), &used);
            const std::string rest = item.substr(colon + 1);
            std::size_t used2 = 0;
            const double L = std::stod(rest, &used2);
            if (used != colon || used2 != rest.size()) throw std::invalid_argument("trailing");
            out.push_back({mu, L});
        } catch (const std::logic_error&) {
            throw ConfigError("bands: cannot parse '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("bands: empty");
    BandSpec b(out);
    validate_bands(b);
    return b;
}

std::string format_bands(const BandSpec& b) {
    std::string s;
    for (std::size_t i = 0; i < b.m(); ++i) {
        if (i) s += ",";
        s += format_number(b[i].mu) + ":" + format_number(b[i].L);
    }
    return s;
}

}  // namespace msopt
