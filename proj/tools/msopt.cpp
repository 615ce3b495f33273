#include "msopt/chebpoly.hpp"
#include "msopt/errors.hpp"
#include "msopt/experiment.hpp"
#include "msopt/lowerbound.hpp"
#include "msopt/search.hpp"
#include "msopt/stochastic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace msopt;

namespace {

constexpr int exit_input = 2;
constexpr int exit_numerical = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<int> parse_counts(const std::string& text, std::size_t m) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(item, &used);
            if (used != item.size()) throw std::invalid_argument("trailing");
            out.push_back(v);
        } catch (const std::logic_error&) {
            throw ConfigError("per-band: cannot parse '" + item + "'");
        }
    }
    if (out.size() == 1) out.assign(m, out[0]);
    if (out.size() != m) throw ConfigError("per-band: needs one count or one per band");
    return out;
}

std::vector<long long> parse_T(const std::string& text) {
    std::vector<long long> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoll(item));
        } catch (const std::logic_error&) {
            throw ConfigError("T: cannot parse '" + item + "'");
        }
    }
    return out;
}

struct ProblemArgs {
    std::string bands;
    std::string per_band = "10";
    std::string placement = "uniform";
    std::uint64_t seed = 1;

    void add(CLI::App* app) {
        app->add_option("--bands", bands, "bands as mu:L,mu:L,...")->required();
        app->add_option("--per-band", per_band, "eigenvalues per band, one count or a list");
        app->add_option("--placement", placement, "endpoints, uniform, log or seeded-random");
        app->add_option("--seed", seed, "problem seed");
    }
    ProblemSpec spec() const {
        ProblemSpec s;
        s.bands = parse_bands(bands).bands;
        s.per_band = parse_counts(per_band, s.bands.size());
        s.placement = parse_placement(placement);
        s.seed = seed;
        return s;
    }
};

bool bits_applies(const std::string& solver) {
    return solver == "gd" || solver == "bsls" || solver == "reorder" || solver == "ordering";
}

void apply_bits(ExperimentConfig& c, const std::string& bits) {
    if (bits.empty()) return;
    const auto p = parse_bits(bits);
    for (auto& s : c.solvers)
        if (bits_applies(s.solver)) s.bits = p.bits;
}

int report(const ExperimentConfig& c, const std::vector<RunRecord>& runs, const std::string& out_dir) {
    if (!out_dir.empty()) write_traces(runs, out_dir);
    const double target = c.eps;
    std::cout << "label,status,queries,final_relative_gap,queries_to_target\n";
    bool ok = true;
    for (const auto& r : runs) {
        const auto& t = r.trace;
        const double g0 = t.initial_gap();
        std::cout << r.label << "," << to_string(t.status) << "," << t.last().queries << ","
                  << format_number(t.final_relative_gap()) << "," << t.queries_to_gap(target * g0) << "\n";
        ok = ok && r.ok();
    }
    return ok ? 0 : exit_numerical;
}

int cmd_preset(const std::string& name, const std::string& out, const std::string& bits) {
    ExperimentConfig c = preset_config(name);
    apply_bits(c, bits);
    const auto runs = run_experiment(c);
    return report(c, runs, out.empty() ? c.output : out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiscale gradient methods: solvers, experiments and certificates"};
    app.require_subcommand(1);
    std::string bits;
    app.add_option("--bits", bits, "significand bits for simulated rounding, or off");

    auto* gen = app.add_subcommand("gen", "write a problem as JSON");
    ProblemArgs gen_args;
    gen_args.add(gen);
    std::string gen_out;
    gen->add_option("-o,--output", gen_out, "output file (default stdout)");

    auto* solve = app.add_subcommand("solve", "run a config, or one solver on a problem file");
    std::string cfg_path, solve_out, problem_path, solver = "bsls", T_text;
    double solve_eps = 1e-6;
    long long solve_steps = -1;
    solve->add_option("--config", cfg_path, "experiment config JSON");
    solve->add_option("--out", solve_out, "directory for trace CSVs");
    solve->add_option("--problem", problem_path, "problem JSON from gen");
    solve->add_option("--solver", solver, "solver name");
    solve->add_option("--eps", solve_eps, "target relative gap");
    solve->add_option("--T", T_text, "schedule override, comma separated, 0 keeps the derived entry");
    solve->add_option("--steps", solve_steps, "baseline step count");

    std::string fig_out;
    auto* fig1 = app.add_subcommand("fig1", "multiscale efficiency comparison");
    auto* fig2 = app.add_subcommand("fig2", "step ordering under rounding");
    auto* fig3 = app.add_subcommand("fig3", "branching versus naive accelerated recursion");
    for (auto* f : {fig1, fig2, fig3}) f->add_option("--out", fig_out, "directory for trace CSVs");

    auto* stoch = app.add_subcommand("stoch", "stochastic BSLS trials");
    ProblemArgs stoch_args;
    stoch_args.add(stoch);
    double stoch_eps = 0.1, beta = 3.0;
    int trials = 10;
    std::uint64_t trial_seed = 1;
    std::string mode = "wishart", stoch_T;
    long long n_avg = 0;
    bool stoch_trace = false;
    stoch->add_option("--eps", stoch_eps, "target squared distance relative to the start");
    stoch->add_option("--beta", beta, "kurtosis bound");
    stoch->add_option("--trials", trials, "number of trials");
    stoch->add_option("--trial-seed", trial_seed, "base seed for the samplers");
    stoch->add_option("--mode", mode, "per-sample or wishart");
    stoch->add_option("--T", stoch_T, "schedule override");
    stoch->add_option("--n-avg", n_avg, "batch size override");
    stoch->add_flag("--trace", stoch_trace, "print the trace of one run instead of trial results");

    auto* search_cmd = app.add_subcommand("search", "parameter search knowing only m, mu_1, L_m and the kappa product");
    ProblemArgs search_args;
    search_args.add(search_cmd);
    double search_eps = 1e-6;
    std::string inner = "bsls";
    search_cmd->add_option("--eps", search_eps, "target relative gap");
    search_cmd->add_option("--inner", inner, "bsls or acbsls");

    auto* poly = app.add_subcommand("poly", "product polynomial and Green's function certificates");
    std::string poly_bands;
    double poly_eps = 1e-2;
    poly->add_option("--bands", poly_bands, "bands as mu:L,...")->required();
    poly->add_option("--eps", poly_eps, "target sup norm");

    auto* lb = app.add_subcommand("lb", "tridiagonal lower-bound instance and Krylov floors");
    std::string lb_bands;
    long long lb_k = 4;
    double lb_R = 1.0;
    lb->add_option("--bands", lb_bands, "bands as mu:L,...")->required();
    lb->add_option("-k", lb_k, "largest Krylov dimension")->required();
    lb->add_option("--R", lb_R, "gradient scale");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_input;
    }

    try {
        if (*gen) {
            const auto p = build_problem(gen_args.spec());
            const auto text = problem_to_json(p);
            if (gen_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(gen_out);
                if (!out) throw ConfigError(gen_out + ": cannot write");
                out << text;
            }
            return 0;
        }
        if (*solve) {
            if (!cfg_path.empty()) {
                ExperimentConfig c = parse_config(read_file(cfg_path));
                apply_bits(c, bits);
                const auto runs = run_experiment(c);
                return report(c, runs, solve_out.empty() ? c.output : solve_out);
            }
            if (problem_path.empty()) throw ConfigError("solve needs --config or --problem");
            const auto p = problem_from_json(read_file(problem_path));
            SolverSpec s;
            s.solver = s.label = solver;
            s.T = parse_T(T_text);
            if (solve_steps >= 0) s.steps = solve_steps;
            if (!bits.empty()) s.bits = parse_bits(bits).bits;
            if (solver == "ordering") throw ConfigError("ordering runs need a config");
            const auto r = run_solver(p, s, solve_eps, Vec::Zero(static_cast<Eigen::Index>(p.dim())));
            write_trace_csv(std::cout, r.trace);
            return r.ok() ? 0 : exit_numerical;
        }
        if (*fig1) return cmd_preset("fig1", fig_out, bits);
        if (*fig2) return cmd_preset("fig2", fig_out, bits);
        if (*fig3) return cmd_preset("fig3", fig_out, bits);
        if (*stoch) {
            const auto p = build_problem(stoch_args.spec());
            const Vec x0 = Vec::Zero(static_cast<Eigen::Index>(p.dim()));
            const double d0 = p.x_star().squaredNorm();
            StochConfig cfg = schedule_stoch(p.bands(), d0, stoch_eps * d0, beta, p.dim(),
                                             p.spectrum().max_multiplicity());
            const auto T = parse_T(stoch_T);
            if (!T.empty()) {
                if (T.size() != cfg.schedule.T.size()) throw ConfigError("T: needs one entry per band");
                for (std::size_t i = 0; i < T.size(); ++i)
                    if (T[i] > 0) cfg.schedule.T[i] = T[i];
            }
            if (n_avg > 0) cfg.n_avg = n_avg;
            const auto sm = parse_sample_mode(mode);
            if (stoch_trace) {
                GaussianSampler s(p, trial_seed, sm);
                RunOptions o;
                o.problem = &p;
                const auto r = bsls_stoch(s, p.bands(), x0, cfg, o);
                write_trace_csv(std::cout, r.trace);
                return r.trace.status == Status::diverged ? exit_numerical : 0;
            }
            if (trials < 1) throw ConfigError("trials must be at least 1");
            write_trials_csv(std::cout, run_stoch_trials(p, x0, cfg, trials, trial_seed, sm));
            return 0;
        }
        if (*search_cmd) {
            const auto p = build_problem(search_args.spec());
            const Vec x0 = Vec::Zero(static_cast<Eigen::Index>(p.dim()));
            const double gap0 = p.gap(x0);
            SearchParams sp;
            sp.m = p.bands().m();
            sp.mu1 = p.bands().mu1();
            sp.Lm = p.bands().Lm();
            sp.pi_kappa = p.bands().kappa_product();
            sp.eps = search_eps * gap0;
            sp.inner = parse_inner(inner);
            QuadraticOracle o(p);
            const auto r = search(o, sp, x0, p.f_star());
            nlohmann::ordered_json j;
            j["candidates"] = candidate_count(sp);
            j["candidate_index"] = r.candidate_index;
            j["candidates_tried"] = r.candidates_tried;
            j["mu_log"] = r.candidate.mu_log;
            j["L_log"] = r.candidate.L_log;
            j["queries"] = r.queries;
            j["inner_budget"] = inner_budget(sp, gap0);
            j["relative_gap"] = r.gap / gap0;
            std::cout << j.dump(2) << "\n";
            return 0;
        }
        if (*poly) {
            const BandSpec bands = parse_bands(poly_bands);
            const auto P = product_poly(bands, poly_eps);
            const double sup = sup_norm_on_set(P, bands);
            const auto g = green_widom(bands);
            const double lower = std::exp(-static_cast<double>(P.degree()) * g.g_numeric);
            nlohmann::ordered_json j;
            j["bands"] = format_bands(bands);
            j["enlarged_bands"] = format_bands(P.bands);
            j["eps"] = poly_eps;
            j["degrees"] = P.degrees();
            j["degree"] = P.degree();
            j["certified_sup"] = sup;
            j["g_numeric"] = g.g_numeric;
            if (std::isnan(g.g_bound))
                j["g_bound"] = nullptr;
            else
                j["g_bound"] = g.g_bound;
            j["rho"] = g.rho;
            j["roots"] = g.roots;
            j["sandwich"] = {lower, sup};
            std::cout << j.dump(2) << "\n";
            return 0;
        }
        if (*lb) {
            const BandSpec bands = parse_bands(lb_bands);
            const auto inst = hard_instance(bands, lb_k, lb_R);
            std::cout << "# weights=" << inst.weights << "\n";
            std::cout << "index,lambda,weight,diag,sub\n";
            for (Eigen::Index i = 0; i < inst.lambda.size(); ++i)
                std::cout << i << "," << format_number(inst.lambda(i)) << "," << format_number(inst.v(i)) << ","
                          << format_number(inst.diag(i)) << ","
                          << (i + 1 < inst.lambda.size() ? format_number(inst.sub(i)) : std::string()) << "\n";
            std::cout << "k,floor\n";
            for (long long k = 0; k <= lb_k; ++k) std::cout << k << "," << format_number(krylov_grad_floor(inst, k)) << "\n";
            return 0;
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    }
    return 0;
}
