#include "vemeta/joint.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vemeta/errors.hpp"
#include "vemeta/server_solver.hpp"
#include "vemeta/vehicle_solvers.hpp"

namespace vemeta {

std::string_view scheme_name(SchemeId id) {
    switch (id) {
        case SchemeId::Proposed: return "Proposed";
        case SchemeId::FCMS: return "FCMS";
        case SchemeId::FSCP: return "FSCP";
        case SchemeId::FARC: return "FARC";
    }
    return "Proposed";
}

std::optional<SchemeId> parse_scheme(std::string_view name) {
    for (SchemeId id : kAllSchemes)
        if (scheme_name(id) == name) return id;
    return std::nullopt;
}

PartialAllocation default_fixing(const ScenarioConfig& cfg, SchemeId scheme) {
    PartialAllocation fixed;
    const std::size_t N = cfg.size();
    switch (scheme) {
        case SchemeId::Proposed: break;
        case SchemeId::FCMS: {
            std::size_t M = cfg.size_grid.size();
            fixed.s = std::vector<double>(N, cfg.size_grid[(M + 1) / 2 - 1]);
            break;
        }
        case SchemeId::FSCP:
            fixed.fs = std::vector<double>(N, cfg.F / static_cast<double>(N));
            break;
        case SchemeId::FARC: {
            std::vector<double> f(N);
            for (std::size_t n = 0; n < N; ++n)
                f[n] = 0.5 * (cfg.vehicles[n].f_min + cfg.vehicles[n].f_max);
            fixed.f = std::move(f);
            break;
        }
    }
    return fixed;
}

namespace {

void check_fixed_length(const std::optional<std::vector<double>>& block, std::size_t N,
                        const char* name) {
    if (block && block->size() != N)
        throw DomainError(std::string("frozen ") + name + " has wrong length");
}

std::optional<double> smallest_admissible_size(const VehicleProfile& v, const ScenarioConfig& cfg) {
    double lower = std::max(cfg.s_min(), min_size_for_accuracy(v.delta, cfg.acc_a, cfg.acc_b));
    for (double g : cfg.size_grid)
        if (g >= lower * (1.0 - kFeasTol)) return g;
    return std::nullopt;
}

std::optional<std::vector<double>> initial_server_split(const std::vector<double>& L, double F) {
    double total = std::accumulate(L.begin(), L.end(), 0.0);
    if (total > F * (1.0 + kFeasTol)) return std::nullopt;
    const double N = static_cast<double>(L.size());
    double even = F / N;
    if (std::all_of(L.begin(), L.end(), [&](double l) { return l <= even; }))
        return std::vector<double>(L.size(), even);
    std::vector<double> fs(L.size());
    double surplus = std::max(0.0, F - total) / N;
    for (std::size_t n = 0; n < L.size(); ++n) fs[n] = L[n] + surplus;
    return fs;
}

double relative_change(double now, double before) {
    if (std::abs(now) < 1e-12) return std::abs(now - before);
    return std::abs((now - before) / now);
}

}  // namespace

Allocation initialize(const ScenarioConfig& cfg, const SolverOptions& opts,
                      const PartialAllocation& fixed) {
    validate(cfg);
    const std::size_t N = cfg.size();
    check_fixed_length(fixed.f, N, "CPU frequency");
    check_fixed_length(fixed.s, N, "size");
    check_fixed_length(fixed.fs, N, "server frequency");
    if (!(cfg.F > 0.0)) throw InfeasibleError("server capacity is zero");

    Allocation a(N);
    for (std::size_t n = 0; n < N; ++n) {
        const auto& v = cfg.vehicles[n];
        if (fixed.s) {
            a.s[n] = (*fixed.s)[n];
        } else {
            auto s0 = smallest_admissible_size(v, cfg);
            if (!s0) throw InfeasibleError("no grid size meets the accuracy target");
            a.s[n] = *s0;
        }
        a.P[n] = v.p_max;
        a.f[n] = fixed.f ? (*fixed.f)[n]
                         : std::clamp(cpu_energy_minimizer(v, opts.paper_formula_variants),
                                      v.f_min, v.f_max);
    }

    auto demands = server_demands(a, cfg);
    auto split = demands ? initial_server_split(*demands, cfg.F) : std::nullopt;
    if (!split && !fixed.f) {
        for (std::size_t n = 0; n < N; ++n) a.f[n] = cfg.vehicles[n].f_max;
        demands = server_demands(a, cfg);
        split = demands ? initial_server_split(*demands, cfg.F) : std::nullopt;
    }
    if (!split) throw InfeasibleError("server demand at the initial point exceeds capacity");
    a.fs = fixed.fs ? *fixed.fs : *split;

    ConstraintAudit audit = audit_constraints(a, cfg, SizeMode::Continuous);
    if (!audit.passed()) throw InfeasibleError("initial point violates the constraints");
    return a;
}

SolveReport joint_solve(const ScenarioConfig& cfg, const SolverOptions& opts,
                        const PartialAllocation& fixed, const Allocation* warm_start) {
    SolveReport rep;
    Allocation cur;
    try {
        if (warm_start) {
            validate(cfg);
            cur = *warm_start;
            if (fixed.f) cur.f = *fixed.f;
            if (fixed.s) cur.s = *fixed.s;
            if (fixed.fs) cur.fs = *fixed.fs;
            if (!audit_constraints(cur, cfg, SizeMode::Continuous).passed())
                throw InfeasibleError("warm start violates the constraints");
        } else {
            cur = initialize(cfg, opts, fixed);
        }
    } catch (const InfeasibleError& e) {
        rep.failure = e.what();
        return rep;
    }

    const std::size_t N = cfg.size();
    const bool variant = opts.paper_formula_variants;
    rep.allocations.push_back(cur);
    rep.utility_trace.push_back(system_utility(cur, cfg));

    auto frozen = [&](Block b) {
        switch (b) {
            case Block::Size: return fixed.s.has_value();
            case Block::Cpu: return fixed.f.has_value();
            case Block::Server: return fixed.fs.has_value();
            case Block::Power: return false;
        }
        return false;
    };

    auto update_size = [&]() -> bool {
        for (std::size_t n = 0; n < N; ++n) {
            const auto& v = cfg.vehicles[n];
            SizeContext ctx = make_size_context(v, cfg, cur.f[n], cur.P[n], cur.fs[n]);
            auto s_cont = solve_size_continuous(v, cfg, ctx, variant);
            if (!s_cont) return false;
            SizeBounds b = size_bounds(v, cfg, ctx);
            auto obj = [&](double s) { return size_objective(s, v, cfg, ctx); };
            auto s = solve_size_discrete(*s_cont, cfg.size_grid, b.lower, b.upper, obj);
            if (!s) return false;
            cur.s[n] = *s;
        }
        return true;
    };

    auto update_power = [&](BlockDiagnostics& diag) -> bool {
        for (std::size_t n = 0; n < N; ++n) {
            const auto& v = cfg.vehicles[n];
            PowerBracket br = power_lower_bound(v, cfg, cur.s[n], cur.f[n], cur.fs[n]);
            if (!br.feasible) return false;
            PowerResult pr =
                solve_power_bisection(br, v, cfg, cur.s[n], opts.power_eps, opts.power_max_iter);
            diag.power_iters_max = std::max(diag.power_iters_max, pr.iterations);
            diag.power_converged = diag.power_converged && pr.converged;
            cur.P[n] = pr.P;
        }
        return true;
    };

    auto update_cpu = [&]() -> bool {
        for (std::size_t n = 0; n < N; ++n) {
            const auto& v = cfg.vehicles[n];
            double rate = transmit_rate(cur.P[n], v, cfg.sigma2);
            auto f = solve_cpu(v, cfg, cur.s[n], cur.P[n], cur.fs[n], rate, variant);
            if (!f) return false;
            cur.f[n] = *f;
        }
        return true;
    };

    auto update_server = [&](BlockDiagnostics& diag) -> bool {
        auto demands = server_demands(cur, cfg);
        if (!demands) return false;
        ServerProblem prob = make_server_problem(cur, cfg);
        if (!server_analytic_solution(prob)) return false;
        DualOptions dopt;
        dopt.max_iter = opts.dual_max_iter;
        dopt.varsigma = opts.varsigma;
        DualResult dr = solve_server_dual(prob, analytic_initial_state(prob, opts.varsigma), dopt);
        diag.dual_iters = dr.state.iter;
        diag.dual_converged = dr.converged;
        for (std::size_t n = 0; n < N; ++n) cur.fs[n] = std::max(dr.fs[n], prob.demand[n]);
        return true;
    };

    for (std::size_t l = 1; l <= opts.max_outer; ++l) {
        BlockDiagnostics diag;
        for (Block b : opts.order) {
            if (frozen(b)) continue;
            bool ok = true;
            const char* name = "";
            switch (b) {
                case Block::Size: ok = update_size(); name = "size"; break;
                case Block::Power: ok = update_power(diag); name = "power"; break;
                case Block::Cpu: ok = update_cpu(); name = "CPU frequency"; break;
                case Block::Server: ok = update_server(diag); name = "server"; break;
            }
            if (!ok) {
                rep.failure = std::string(name) + " block infeasible at outer iteration " +
                              std::to_string(l);
                rep.outer_iters = l - 1;
                rep.audit = audit_constraints(rep.allocations.back(), cfg, SizeMode::Discrete);
                return rep;
            }
        }
        rep.diagnostics.push_back(diag);
        rep.allocations.push_back(cur);
        rep.utility_trace.push_back(system_utility(cur, cfg));
        rep.outer_iters = l;
        const auto& tr = rep.utility_trace;
        if (relative_change(tr[tr.size() - 1], tr[tr.size() - 2]) <= opts.xi) {
            rep.converged = true;
            break;
        }
    }

    rep.audit = audit_constraints(cur, cfg, SizeMode::Discrete);
    rep.feasible = rep.audit.passed();
    if (!rep.feasible) {
        rep.converged = false;
        rep.failure = "final allocation violates the constraints";
    } else if (!rep.converged) {
        rep.failure = "no convergence within the outer iteration limit";
    }
    rep.breakdown = energy_breakdown(cur, cfg);
    return rep;
}

SolveReport solve_scheme(const ScenarioConfig& cfg, SchemeId scheme, const SolverOptions& opts,
                         const std::optional<PartialAllocation>& fixed) {
    return joint_solve(cfg, opts, fixed ? *fixed : default_fixing(cfg, scheme));
}

}  // namespace vemeta
