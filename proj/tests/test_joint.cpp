#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vemeta/errors.hpp"
#include "vemeta/joint.hpp"
#include "vemeta/scenario.hpp"
#include "vemeta/server_solver.hpp"
#include "vemeta/vehicle_solvers.hpp"

using namespace vemeta;

namespace {

ScenarioConfig default_scenario(std::uint64_t seed) {
    ScenarioSpec spec;
    return generate_scenario(spec, seed).cfg;
}

// One vehicle whose only feasible point is (s, f, P, fs) = (400, 1 GHz, 1 W, F).
ScenarioConfig pinned_vehicle() {
    ScenarioConfig cfg;
    VehicleProfile v;
    v.channel_h = 1e-10;
    v.f_min = v.f_max = 1e9;
    v.p_max = 1.0;
    cfg.vehicles = {v};
    cfg.size_grid = {400};
    cfg.F = 1e8;
    double x = cfg.phi * 400.0 * 400.0;
    cfg.T = v.workload_C / 1e9 + x / transmit_rate(1.0, v, cfg.sigma2) +
            x * v.cycles_per_bit_c / cfg.F;
    return cfg;
}

}  // namespace

TEST_CASE("scheme names round trip") {
    for (SchemeId id : kAllSchemes) CHECK(parse_scheme(scheme_name(id)) == id);
    CHECK_FALSE(parse_scheme("Greedy").has_value());
}

TEST_CASE("initialization") {
    ScenarioConfig cfg = default_scenario(42);
    Allocation a = initialize(cfg);
    CHECK(audit_constraints(a, cfg).passed());

    SUBCASE("long window leaves a tiny power requirement") {
        ScenarioConfig toy = pinned_vehicle();
        toy.vehicles[0].f_min = 0.5e9;
        toy.vehicles[0].f_max = 2e9;
        toy.vehicles[0].p_max = 2.0;
        toy.size_grid = {100, 400, 700};
        toy.T = 1e4;
        toy.F = 2.5e9;
        Allocation init = initialize(toy);
        CHECK(audit_constraints(init, toy).passed());
        PowerBracket b = power_lower_bound(toy.vehicles[0], toy, init.s[0], init.f[0], init.fs[0]);
        CHECK(b.q_n < 1e-6);
        auto rep = joint_solve(toy);
        REQUIRE(rep.feasible);
        CHECK(rep.final_allocation().P[0] < 1e-6);
    }
    SUBCASE("zero capacity") {
        cfg.F = 0.0;
        CHECK_THROWS_AS(initialize(cfg), InfeasibleError);
        auto rep = joint_solve(cfg);
        CHECK_FALSE(rep.feasible);
        CHECK_FALSE(rep.failure.empty());
    }
}

TEST_CASE("joint solve on the default scenario") {
    ScenarioConfig cfg = default_scenario(42);
    SolveReport rep = joint_solve(cfg);
    REQUIRE(rep.feasible);
    CHECK(rep.converged);
    CHECK(rep.outer_iters <= 10);
    CHECK(rep.utility_trace.size() == rep.outer_iters + 1);
    CHECK(rep.allocations.size() == rep.outer_iters + 1);
    for (std::size_t l = 1; l < rep.utility_trace.size(); ++l)
        CHECK(rep.utility_trace[l] >= rep.utility_trace[l - 1] - 1e-9);
    CHECK(rep.audit.passed());
    CHECK(rep.breakdown.utility == doctest::Approx(rep.utility_trace.back()).epsilon(1e-14));

    SUBCASE("restart from the solution is a fixed point") {
        Allocation warm = rep.final_allocation();
        SolveReport again = joint_solve(cfg, {}, {}, &warm);
        REQUIRE(again.feasible);
        CHECK(again.outer_iters <= 1);
    }
    SUBCASE("freezing the size at the solution reproduces the utility") {
        PartialAllocation fixed;
        fixed.s = rep.final_allocation().s;
        SolveReport fcms = solve_scheme(cfg, SchemeId::FCMS, {}, fixed);
        REQUIRE(fcms.feasible);
        CHECK(fcms.utility_trace.back() ==
              doctest::Approx(rep.utility_trace.back()).epsilon(1e-9));
    }
    SUBCASE("baselines do not beat the proposed scheme") {
        for (SchemeId id : {SchemeId::FCMS, SchemeId::FSCP, SchemeId::FARC}) {
            SolveReport b = solve_scheme(cfg, id);
            if (!b.feasible) continue;
            CHECK(b.utility_trace.back() <= rep.utility_trace.back() + 1e-9);
        }
        PartialAllocation at_max;
        at_max.f = std::vector<double>(cfg.size(), cfg.vehicles[0].f_max);
        SolveReport farc = solve_scheme(cfg, SchemeId::FARC, {}, at_max);
        REQUIRE(farc.feasible);
        CHECK(farc.utility_trace.back() <= rep.utility_trace.back() + 1e-9);
    }
    SUBCASE("a feasible audited point is accepted by every block solver") {
        const Allocation& a = rep.final_allocation();
        for (std::size_t n = 0; n < cfg.size(); ++n) {
            const auto& v = cfg.vehicles[n];
            SizeContext ctx = make_size_context(v, cfg, a.f[n], a.P[n], a.fs[n]);
            CHECK(solve_size_continuous(v, cfg, ctx).has_value());
            CHECK(power_lower_bound(v, cfg, a.s[n], a.f[n], a.fs[n]).feasible);
            CHECK(solve_cpu(v, cfg, a.s[n], a.P[n], a.fs[n], ctx.rate).has_value());
        }
        auto prob = make_server_problem(a, cfg);
        CHECK(server_analytic_solution(prob).has_value());
    }
}

TEST_CASE("default fixings") {
    ScenarioConfig cfg = default_scenario(1);
    std::size_t M = cfg.size_grid.size();
    auto fcms = default_fixing(cfg, SchemeId::FCMS);
    REQUIRE(fcms.s);
    CHECK((*fcms.s)[0] == cfg.size_grid[(M + 1) / 2 - 1]);
    auto fscp = default_fixing(cfg, SchemeId::FSCP);
    REQUIRE(fscp.fs);
    CHECK((*fscp.fs)[0] == doctest::Approx(cfg.F / 30.0));
    auto farc = default_fixing(cfg, SchemeId::FARC);
    REQUIRE(farc.f);
    CHECK((*farc.f)[0] == doctest::Approx(1.25e9));
    auto prop = default_fixing(cfg, SchemeId::Proposed);
    CHECK_FALSE(prop.f);
    CHECK_FALSE(prop.s);
    CHECK_FALSE(prop.fs);
}

TEST_CASE("pinned vehicle converges in one outer iteration") {
    ScenarioConfig cfg = pinned_vehicle();
    SolveReport rep = joint_solve(cfg);
    REQUIRE(rep.feasible);
    CHECK(rep.converged);
    CHECK(rep.outer_iters == 1);
    const Allocation& a = rep.final_allocation();
    CHECK(a.s[0] == 400.0);
    CHECK(a.f[0] == 1e9);
    CHECK(a.P[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(a.fs[0] == doctest::Approx(cfg.F).epsilon(1e-9));
}

TEST_CASE("outer loop limit is reported") {
    ScenarioConfig cfg = default_scenario(3);
    SolverOptions opt;
    opt.max_outer = 1;
    opt.xi = 1e-15;
    SolveReport rep = joint_solve(cfg, opt);
    CHECK(rep.feasible);
    CHECK_FALSE(rep.converged);
    CHECK(rep.outer_iters == 1);
}

TEST_CASE("alternative settings still yield feasible points") {
    ScenarioConfig cfg = default_scenario(5);
    SolverOptions variants;
    variants.paper_formula_variants = true;
    CHECK(joint_solve(cfg, variants).feasible);

    SolverOptions reordered;
    reordered.order = {Block::Power, Block::Size, Block::Server, Block::Cpu};
    CHECK(joint_solve(cfg, reordered).feasible);
}

TEST_CASE("frozen size below the accuracy floor is infeasible") {
    ScenarioConfig cfg = default_scenario(2);
    PartialAllocation fixed;
    fixed.s = std::vector<double>(cfg.size(), 300.0);
    SolveReport rep = solve_scheme(cfg, SchemeId::FCMS, {}, fixed);
    CHECK_FALSE(rep.feasible);
}
