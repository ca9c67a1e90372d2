#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vemeta/errors.hpp"
#include "vemeta/experiment.hpp"
#include "vemeta/joint.hpp"
#include "vemeta/scenario.hpp"
#include "vemeta/server_solver.hpp"
#include "vemeta/vehicle_solvers.hpp"

namespace fs = std::filesystem;
using namespace vemeta;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitNoConvergence = 3;

struct CommonArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    double xi = 1e-4;
    double eps = 1e-8;
    double varsigma = 1e-9;
    std::size_t max_outer = 50;
    bool paper_variants = false;
    std::string out_dir = ".";

    SolverOptions options() const {
        SolverOptions o;
        o.xi = xi;
        o.power_eps = eps;
        o.varsigma = varsigma;
        o.max_outer = max_outer;
        o.paper_formula_variants = paper_variants;
        return o;
    }
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("config", a.config, "Experiment configuration (JSON)")->required();
    cmd->add_option("--seed", a.seed, "Scenario seed (overrides the config)");
    cmd->add_option("--xi", a.xi, "Relative utility tolerance of the outer loop")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--eps", a.eps, "Bisection tolerance of the power solver")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--varsigma", a.varsigma, "Multiplier tolerance of the dual solver")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-outer", a.max_outer, "Outer iteration limit")->check(CLI::PositiveNumber);
    cmd->add_flag("--paper-formula-variants", a.paper_variants,
                  "Use the alternative closed forms for size and CPU frequency");
    cmd->add_option("--out-dir", a.out_dir, "Directory for output files");
}

SchemeId scheme_or_throw(const std::string& name) {
    auto id = parse_scheme(name);
    if (!id) throw ConfigError("unknown scheme '" + name + "'");
    return *id;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError(path.string() + ": cannot open for writing");
    return out;
}

int cmd_solve(const CommonArgs& a, const std::string& scheme_flag) {
    ScenarioSpec spec = parse_config(a.config);
    std::uint64_t seed = a.seed.value_or(spec.seed);
    SchemeId scheme = scheme_or_throw(scheme_flag.empty() ? spec.scheme : scheme_flag);
    GeneratedScenario gen = generate_scenario(spec, seed);
    SolveReport rep = solve_scheme(gen.cfg, scheme, a.options());

    fs::path dir(a.out_dir);
    auto report = open_output(dir / "report.json");
    report << report_to_json(rep, gen.cfg, scheme, &gen).dump(2) << '\n';
    auto trace = open_output(dir / "trace.csv");
    write_trace_csv(trace, rep);

    if (!rep.feasible) {
        std::cerr << "infeasible: " << rep.failure << '\n';
        std::cout << "scheme=" << scheme_name(scheme) << " seed=" << seed << " status=infeasible\n";
        return kExitInfeasible;
    }
    std::cout << "scheme=" << scheme_name(scheme) << " seed=" << seed
              << " utility=" << format_number(rep.utility_trace.back())
              << " outer_iters=" << rep.outer_iters
              << " status=" << (rep.converged ? "converged" : "not-converged") << '\n';
    if (!rep.converged) {
        std::cerr << rep.failure << '\n';
        return kExitNoConvergence;
    }
    return kExitOk;
}

struct SweepArgs {
    std::string axis;
    std::vector<double> values;
    std::vector<std::string> schemes;
    std::vector<std::uint64_t> seeds;
    std::string output;
    bool wall_time = false;
};

int cmd_sweep(const CommonArgs& a, const SweepArgs& s) {
    ScenarioSpec spec = parse_config(a.config);
    SweepRequest req;
    req.axis = s.axis.empty() && spec.sweep ? spec.sweep->axis : s.axis;
    req.values = s.values.empty() && spec.sweep ? spec.sweep->values : s.values;
    if (req.axis.empty()) throw ConfigError("no sweep axis given (--axis or sweep.axis)");
    if (!is_sweep_axis(req.axis)) throw ConfigError("unknown sweep axis '" + req.axis + "'");
    if (req.values.empty()) throw ConfigError("no sweep values given (--values or sweep.values)");
    if (!s.schemes.empty()) {
        req.schemes.clear();
        for (const auto& name : s.schemes) req.schemes.push_back(scheme_or_throw(name));
    }
    req.seeds = s.seeds;
    if (req.seeds.empty()) req.seeds.push_back(a.seed.value_or(spec.seed));
    req.spec = std::move(spec);
    req.options = a.options();
    req.measure_wall_time = s.wall_time;

    auto rows = run_sweep(req);
    fs::path path = s.output.empty() ? fs::path(a.out_dir) / "sweep.csv" : fs::path(s.output);
    auto out = open_output(path);
    write_sweep_csv(out, rows);

    std::size_t infeasible = 0;
    for (const auto& r : rows) infeasible += r.feasible ? 0 : 1;
    std::cout << "axis=" << req.axis << " rows=" << rows.size() << " infeasible=" << infeasible
              << " output=" << path.string() << '\n';
    return kExitOk;
}

struct ConvergenceArgs {
    int algorithm = 4;
    std::string dual_init = "cold";
    double eta0 = 1.0;
    std::string step = "diminishing";
    std::size_t vehicle = 0;
    std::string output;
};

int cmd_convergence(const CommonArgs& a, const ConvergenceArgs& c) {
    ScenarioSpec spec = parse_config(a.config);
    std::uint64_t seed = a.seed.value_or(spec.seed);
    GeneratedScenario gen = generate_scenario(spec, seed);
    const ScenarioConfig& cfg = gen.cfg;
    SolverOptions opts = a.options();
    SolveReport rep = solve_scheme(cfg, SchemeId::Proposed, opts);
    if (!rep.feasible) {
        std::cerr << "infeasible: " << rep.failure << '\n';
        return kExitInfeasible;
    }
    const Allocation& alloc = rep.final_allocation();

    fs::path path = c.output.empty()
                        ? fs::path(a.out_dir) / ("convergence_alg" + std::to_string(c.algorithm) + ".csv")
                        : fs::path(c.output);
    auto out = open_output(path);
    std::size_t rows = 0;
    bool converged = true;
    if (c.algorithm == 2) {
        if (c.vehicle >= cfg.size()) throw ConfigError("--vehicle is out of range");
        const auto& v = cfg.vehicles[c.vehicle];
        PowerBracket br =
            power_lower_bound(v, cfg, alloc.s[c.vehicle], alloc.f[c.vehicle], alloc.fs[c.vehicle]);
        PowerResult pr = solve_power_bisection(br, v, cfg, alloc.s[c.vehicle], opts.power_eps,
                                               opts.power_max_iter);
        write_power_trace(out, pr);
        rows = pr.trace.size();
        converged = pr.converged;
    } else if (c.algorithm == 3) {
        ServerProblem prob = make_server_problem(alloc, cfg);
        DualState st = c.dual_init == "analytic" ? analytic_initial_state(prob, opts.varsigma)
                                                 : cold_initial_state(prob, opts.varsigma);
        DualOptions dopt;
        dopt.max_iter = opts.dual_max_iter;
        dopt.varsigma = opts.varsigma;
        dopt.eta0 = c.eta0;
        dopt.rule = c.step == "constant" ? StepRule::Constant : StepRule::Diminishing;
        dopt.record_trace = true;
        DualResult dr = solve_server_dual(prob, st, dopt);
        write_dual_trace(out, dr, sample_vehicles(cfg.size(), 4, seed));
        rows = dr.trace.size();
        converged = dr.converged;
    } else {
        write_utility_trace(out, rep);
        rows = rep.utility_trace.size();
        converged = rep.converged;
    }
    std::cout << "algorithm=" << c.algorithm << " rows=" << rows
              << " status=" << (converged ? "converged" : "not-converged")
              << " output=" << path.string() << '\n';
    return converged ? kExitOk : kExitNoConvergence;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resource allocation solver for AR vehicular edge computing"};
    app.require_subcommand(1);

    CommonArgs solve_args, sweep_args, conv_args;
    std::string scheme_flag;
    auto* solve = app.add_subcommand("solve", "Solve one scenario and write report.json and trace.csv");
    add_common(solve, solve_args);
    solve->add_option("--scheme", scheme_flag, "Proposed, FCMS, FSCP or FARC");

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep and write a CSV table");
    add_common(sweep, sweep_args);
    sweep->add_option("--axis", sw.axis, "B, f_min, s_min, delta, F, T or s_max");
    sweep->add_option("--values", sw.values, "Comma-separated axis values")->delimiter(',');
    sweep->add_option("--schemes", sw.schemes, "Comma-separated schemes")->delimiter(',');
    sweep->add_option("--seeds", sw.seeds, "Comma-separated scenario seeds")->delimiter(',');
    sweep->add_option("--output,-o", sw.output, "CSV path (default <out-dir>/sweep.csv)");
    sweep->add_flag("--wall-time", sw.wall_time, "Record measured wall time per run");

    ConvergenceArgs cv;
    auto* conv = app.add_subcommand("convergence", "Write the iteration trace of one algorithm");
    add_common(conv, conv_args);
    conv->add_option("--algorithm", cv.algorithm, "2 (power), 3 (server dual) or 4 (joint)")
        ->check(CLI::IsMember({2, 3, 4}));
    conv->add_option("--dual-init", cv.dual_init, "Dual starting point: cold or analytic")
        ->check(CLI::IsMember({"cold", "analytic"}));
    conv->add_option("--eta0", cv.eta0, "Initial dual step scale")->check(CLI::PositiveNumber);
    conv->add_option("--step", cv.step, "Dual step rule: diminishing or constant")
        ->check(CLI::IsMember({"diminishing", "constant"}));
    conv->add_option("--vehicle", cv.vehicle, "Vehicle index for the power trace");
    conv->add_option("--output,-o", cv.output, "CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (solve->parsed()) return cmd_solve(solve_args, scheme_flag);
        if (sweep->parsed()) return cmd_sweep(sweep_args, sw);
        if (conv->parsed()) return cmd_convergence(conv_args, cv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
