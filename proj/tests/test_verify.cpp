#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vemeta/errors.hpp"
#include "vemeta/joint.hpp"
#include "vemeta/verify.hpp"

using namespace vemeta;
namespace vf = vemeta::verify;

TEST_CASE("grid optimizer") {
    auto sq = [](double x) { return x * x; };
    auto best = vf::grid_argopt(sq, {-1.0, 1.0, 1001}, vf::Direction::Min);
    CHECK(std::abs(best.x) < 1e-6);
    CHECK(best.value < 1e-12);

    auto shifted = [](double x) { return -(x - 0.123456789) * (x - 0.123456789); };
    auto top = vf::grid_argopt(shifted, {-1.0, 1.0, 1001}, vf::Direction::Max);
    CHECK(std::abs(top.x - 0.123456789) < 2e-6);

    auto rising = [](double x) { return 3.0 * x; };
    CHECK(vf::grid_argopt(rising, {2.0, 5.0, 100}, vf::Direction::Min).x == 2.0);
    CHECK(vf::grid_argopt(rising, {2.0, 5.0, 100}, vf::Direction::Max).x == 5.0);

    auto logq = [](double x) { return std::pow(std::log(x) - std::log(3e5), 2); };
    auto lb = vf::grid_argopt(logq, {1.0, 1e9, 10000, vf::GridScale::Log}, vf::Direction::Min);
    CHECK(lb.x == doctest::Approx(3e5).epsilon(1e-5));

    CHECK_THROWS_AS(vf::grid_argopt(sq, {1.0, -1.0, 10}, vf::Direction::Min), DomainError);
    CHECK_THROWS_AS(vf::grid_argopt(sq, {0.0, 1.0, 10, vf::GridScale::Log}, vf::Direction::Min),
                    DomainError);
}

TEST_CASE("quasiconvexity checker") {
    auto linear = [](double x) { return 2.0 * x - 1.0; };
    CHECK(vf::check_quasiconvex(linear, -5.0, 5.0, 10000, 1).passed);

    auto wave = [](double x) { return std::sin(x); };
    auto res = vf::check_quasiconvex(wave, 0.0, 4.0 * std::numbers::pi, 10000, 1);
    CHECK_FALSE(res.passed);
    REQUIRE(res.witness);
    CHECK(res.witness->f2 > std::max(res.witness->f1, res.witness->f3));
    CHECK(res.witness->x1 <= res.witness->x2);
    CHECK(res.witness->x2 <= res.witness->x3);

    VehicleProfile v;
    v.channel_h = 2e-10;
    double sigma2 = 3.98e-21;
    auto ratio = [&](double P) { return 0.1 * 24.0 * 4e4 * P / transmit_rate(P, v, sigma2); };
    CHECK(vf::check_quasiconvex(ratio, 1e-6, 2.0, 10000, 5).passed);
}

TEST_CASE("subgradient checker") {
    // Convex quadratic with minimum at (1, 2).
    auto fn = [](const std::vector<double>& z) {
        return (z[0] - 1.0) * (z[0] - 1.0) + 2.0 * (z[1] - 2.0) * (z[1] - 2.0);
    };
    std::vector<double> spread{3.0, 3.0};
    auto at_min = vf::check_subgradient_inequality(fn, {1.0, 2.0}, {0.0, 0.0}, spread, 1000, 2);
    CHECK(at_min.passed);
    CHECK(at_min.worst_slack >= 0.0);

    std::vector<double> p{3.0, 0.5};
    std::vector<double> grad{2.0 * (p[0] - 1.0), 4.0 * (p[1] - 2.0)};
    CHECK(vf::check_subgradient_inequality(fn, p, grad, spread, 1000, 3).passed);

    std::vector<double> negated{-grad[0], -grad[1]};
    auto bad = vf::check_subgradient_inequality(fn, p, negated, spread, 1000, 3);
    CHECK_FALSE(bad.passed);
    REQUIRE(bad.witness);
    CHECK(bad.witness->slack < 0.0);
}

TEST_CASE("exhaustive joint oracle") {
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

    SUBCASE("pinned vehicle matches the joint solver") {
        auto oracle = vf::exhaustive_joint_oracle(cfg);
        REQUIRE(oracle);
        auto rep = joint_solve(cfg);
        REQUIRE(rep.feasible);
        CHECK(oracle->utility == doctest::Approx(rep.utility_trace.back()).epsilon(1e-12));
        CHECK(oracle->allocation.s[0] == 400.0);
    }
    SUBCASE("no feasible point") {
        cfg.T = 0.1;
        CHECK_FALSE(vf::exhaustive_joint_oracle(cfg).has_value());
        cfg.T = 1.0;
        cfg.F = 0.0;
        CHECK_FALSE(vf::exhaustive_joint_oracle(cfg).has_value());
    }
    SUBCASE("two vehicles respect the capacity") {
        cfg.vehicles.push_back(v);
        cfg.vehicles[1].channel_h = 5e-11;
        cfg.vehicles[0].f_max = cfg.vehicles[1].f_max = 2e9;
        cfg.vehicles[0].f_min = cfg.vehicles[1].f_min = 0.5e9;
        cfg.size_grid = {300, 400, 500, 600};
        cfg.T = 1.0;
        cfg.F = 1.7e8;
        auto oracle = vf::exhaustive_joint_oracle(cfg, {20});
        REQUIRE(oracle);
        CHECK(oracle->allocation.fs[0] + oracle->allocation.fs[1] <= cfg.F * (1.0 + 1e-12));
        CHECK(audit_constraints(oracle->allocation, cfg, SizeMode::Discrete, 1e-9).passed());
        CHECK(system_utility(oracle->allocation, cfg) ==
              doctest::Approx(oracle->utility).epsilon(1e-12));
    }
    SUBCASE("size limits") {
        cfg.vehicles = {v, v, v};
        CHECK_THROWS_AS(vf::exhaustive_joint_oracle(cfg), DomainError);
    }
}
