#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "vemeta/errors.hpp"
#include "vemeta/scenario.hpp"

using namespace vemeta;
using nlohmann::json;

namespace {

json load_fixture(const std::string& name) {
    std::ifstream in(std::string(VEMETA_FIXTURE_DIR) + "/" + name);
    REQUIRE(in.good());
    return json::parse(in);
}

std::string config_error(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("size grid") {
    auto g = make_size_grid(100, 700, 25);
    CHECK(g.size() == 25);
    CHECK(g.front() == 100);
    CHECK(g.back() == 700);
    auto odd = make_size_grid(100, 260, 50);
    CHECK(odd == std::vector<double>{100, 150, 200, 250, 260});
    CHECK(make_size_grid(300, 300, 25) == std::vector<double>{300});
    CHECK_THROWS_AS(make_size_grid(300, 200, 25), ConfigError);
}

TEST_CASE("generation is deterministic") {
    ScenarioSpec spec;
    auto a = generate_scenario(spec, 7);
    auto b = generate_scenario(spec, 7);
    REQUIRE(a.cfg.size() == 30);
    for (std::size_t n = 0; n < a.cfg.size(); ++n)
        CHECK(a.cfg.vehicles[n].channel_h == b.cfg.vehicles[n].channel_h);
    auto c = generate_scenario(spec, 8);
    CHECK(c.cfg.vehicles[0].channel_h != a.cfg.vehicles[0].channel_h);
    CHECK(a.cfg.rng_seed == 7);
}

TEST_CASE("channel model") {
    CHECK(channel_gain(32.0, 3.0, 200.0, 0.7) ==
          doctest::Approx(std::pow(2.0, -3.0) * channel_gain(32.0, 3.0, 100.0, 0.7)).epsilon(1e-14));
    CHECK(channel_gain(30.0, 3.0, 10.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));

    ScenarioSpec spec;
    auto gen = generate_scenario(spec, 11);
    double mean_fading = 0.0;
    for (std::size_t n = 0; n < gen.cfg.size(); ++n) {
        CHECK(gen.cfg.vehicles[n].channel_h > 0.0);
        CHECK(gen.distance[n] >= spec.defaults.d_min);
        CHECK(gen.distance[n] <= spec.defaults.area / std::sqrt(2.0));
        CHECK(gen.cfg.vehicles[n].channel_h ==
              channel_gain(32.0, 3.0, gen.distance[n], gen.fading[n]));
        mean_fading += gen.fading[n];
    }

    ScenarioSpec many;
    many.defaults.n_vehicles = 20000;
    many.defaults.B = 1e9;
    auto big = generate_scenario(many, 3, 0);
    double mean = 0.0;
    for (double f : big.fading) mean += f;
    mean /= static_cast<double>(big.fading.size());
    CHECK(mean == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("overrides and rejection") {
    ScenarioSpec spec;
    VehicleOverride o;
    o.channel_h = 1e-9;
    o.rho = 0.07;
    spec.vehicles = {o};
    auto gen = generate_scenario(spec, 5);
    CHECK(gen.cfg.vehicles[0].channel_h == 1e-9);
    CHECK(gen.cfg.vehicles[0].rho == 0.07);
    CHECK(gen.cfg.vehicles[1].rho == spec.defaults.rho);
    CHECK(gen.feasible_at_init);
    CHECK(admits_initial_allocation(gen.cfg));

    ScenarioSpec starved;
    starved.global.F = 1e6;
    auto bad = generate_scenario(starved, 5, 10);
    CHECK_FALSE(bad.feasible_at_init);
    CHECK(bad.rejections == 10);

    // Narrow channels make the upload time depend on the fading draw.
    ScenarioSpec tight;
    tight.defaults.B = 1.6e5;
    tight.defaults.n_vehicles = 5;
    std::size_t total_rejections = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto g = generate_scenario(tight, seed);
        total_rejections += g.rejections;
        if (g.feasible_at_init) CHECK(admits_initial_allocation(g.cfg));
    }
    CHECK(total_rejections > 0);

    ScenarioSpec too_many;
    too_many.defaults.n_vehicles = 1;
    too_many.vehicles = {o, o};
    CHECK_THROWS_AS(generate_scenario(too_many, 1), ConfigError);
}

TEST_CASE("golden seed-42 scenario") {
    json golden = load_fixture("golden_seed42_report.json");
    json utility = load_fixture("golden_seed42_utility.json");
    CHECK(golden["generator"]["version"].get<int>() == kGeneratorVersion);

    ScenarioSpec spec = parse_config(std::string(VEMETA_FIXTURE_DIR) + "/minimal.json");
    auto gen = generate_scenario(spec, spec.seed);
    const json& vehicles = golden["scenario"]["vehicles"];
    REQUIRE(vehicles.size() == gen.cfg.size());
    for (std::size_t n = 0; n < gen.cfg.size(); ++n)
        CHECK(gen.cfg.vehicles[n].channel_h == vehicles[n]["channel_h"].get<double>());
    CHECK(gen.cfg.size_grid == golden["scenario"]["size_grid"].get<std::vector<double>>());

    const json& alloc = golden["allocation"];
    Allocation a;
    a.f = alloc["f"].get<std::vector<double>>();
    a.P = alloc["P"].get<std::vector<double>>();
    a.s = alloc["s"].get<std::vector<double>>();
    a.fs = alloc["fs"].get<std::vector<double>>();
    CHECK(audit_constraints(a, gen.cfg).passed());
    CHECK(system_utility(a, gen.cfg) ==
          doctest::Approx(utility["utility"].get<double>()).epsilon(1e-13));
}

TEST_CASE("configuration parsing") {
    SUBCASE("minimal config gives the defaults") {
        ScenarioSpec spec = parse_config_text(R"({"seed": 9})");
        ScenarioSpec ref;
        CHECK(spec.seed == 9);
        CHECK(spec.global.T == ref.global.T);
        CHECK(spec.global.F == ref.global.F);
        CHECK(spec.defaults.n_vehicles == 30);
        CHECK(spec.defaults.B == 1e7);
        CHECK(spec.defaults.delta == 0.85);
        CHECK(spec.scheme == "Proposed");
        CHECK_FALSE(spec.sweep.has_value());
    }
    SUBCASE("full config") {
        ScenarioSpec spec = parse_config_text(R"({
            "global": {"T": 0.8, "F": 3e9, "sigma2": 1e-20, "phi": 24, "kappa_ser": 1e-27,
                       "acc_a": 1.578, "acc_b": 0.0065},
            "defaults": {"n_vehicles": 4, "B": 2e7, "delta": 0.8, "theta_db": -10},
            "vehicles": [{"channel_h": 1e-9}, {"rho": 0.05}],
            "size_grid": [300, 400, 500],
            "sweep": {"axis": "B", "values": [10e6, 20e6, 30e6, 40e6, 50e6]},
            "seed": 3,
            "scheme": "FARC"
        })");
        CHECK(spec.global.T == 0.8);
        CHECK(spec.defaults.n_vehicles == 4);
        CHECK(spec.defaults.theta_db == -10);
        CHECK(spec.vehicles.size() == 2);
        CHECK(*spec.vehicles[0].channel_h == 1e-9);
        CHECK(spec.size_grid == std::vector<double>{300, 400, 500});
        REQUIRE(spec.sweep);
        CHECK(spec.sweep->axis == "B");
        CHECK(spec.sweep->values.size() == 5);
        CHECK(spec.scheme == "FARC");
    }
    SUBCASE("schema errors name the key") {
        CHECK(config_error(R"({"global": {"T": -1}})").find("global.T") != std::string::npos);
        CHECK(config_error(R"({"global": {"Tx": 1}})").find("global.Tx: unknown key") !=
              std::string::npos);
        CHECK(config_error(R"({"defaults": {"B": "wide"}})").find("defaults.B: expected a number") !=
              std::string::npos);
        CHECK(config_error(R"({"vehicles": [{"delta": 1.5}]})").find("vehicles[0].delta") !=
              std::string::npos);
        CHECK(config_error(R"({"size_grid": [300, 200]})").find("size_grid[1]") != std::string::npos);
        CHECK(config_error(R"({"sweep": {"axis": "rho", "values": [1]}})").find("sweep.axis") !=
              std::string::npos);
        CHECK(config_error(R"({"seed": -4})").find("seed") != std::string::npos);
        CHECK(config_error(R"({"scheme": "Best"})").find("scheme") != std::string::npos);
        CHECK(config_error(R"({"bogus": 1})").find("bogus") != std::string::npos);
        CHECK(config_error(R"({"defaults": {"f_min": 3e9}})").find("f_min") != std::string::npos);
        CHECK(config_error(R"({"global": {"F": 0}})").empty());
    }
    SUBCASE("syntax errors carry line and column") {
        std::string msg = config_error("{\n  \"seed\": 1,\n  \"global\": {,}\n}");
        CHECK(msg.find("line 3") != std::string::npos);
        CHECK(msg.find("column") != std::string::npos);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(parse_config("/nonexistent/config.json"), ConfigError);
    }
}

TEST_CASE("sweep axes") {
    ScenarioSpec spec;
    auto gen = generate_scenario(spec, 4);
    ScenarioConfig cfg = gen.cfg;
    double h0 = cfg.vehicles[3].channel_h;
    apply_axis(cfg, spec.defaults, "B", 3e7);
    CHECK(cfg.vehicles[3].bandwidth_B == 3e7);
    CHECK(cfg.vehicles[3].channel_h == h0);
    apply_axis(cfg, spec.defaults, "f_min", 0.7e9);
    CHECK(cfg.vehicles[0].f_min == 0.7e9);
    apply_axis(cfg, spec.defaults, "delta", 0.8);
    CHECK(cfg.vehicles[0].delta == 0.8);
    apply_axis(cfg, spec.defaults, "F", 3e9);
    CHECK(cfg.F == 3e9);
    apply_axis(cfg, spec.defaults, "T", 1.2);
    CHECK(cfg.T == 1.2);
    apply_axis(cfg, spec.defaults, "s_min", 150);
    CHECK(cfg.s_min() == 150);
    CHECK(cfg.s_max() == 700);
    apply_axis(cfg, spec.defaults, "s_max", 500);
    CHECK(cfg.s_min() == 150);
    CHECK(cfg.s_max() == 500);
    CHECK_THROWS_AS(apply_axis(cfg, spec.defaults, "rho", 1.0), ConfigError);
    CHECK_THROWS_AS(apply_axis(cfg, spec.defaults, "delta", 1.0), ConfigError);
    for (auto axis : kSweepAxes) CHECK(is_sweep_axis(axis));
}
