#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vemeta/model.hpp"

namespace vemeta {

inline constexpr int kGeneratorVersion = 1;

struct GlobalParams {
    double T = 1.0;
    double F = 2.5e9;
    double sigma2 = 3.981071705534972e-21;
    double phi = 24.0;
    double kappa_ser = 1e-27;
    double acc_a = 1.578;
    double acc_b = 6.5e-3;
};

struct FleetDefaults {
    std::size_t n_vehicles = 30;
    double B = 1e7;
    double f_min = 0.5e9;
    double f_max = 2e9;
    double c = 2.95;
    double p_max = 2.0;
    double delta = 0.85;
    double kappa = 1e-27;
    double zeta = 1.0;
    double workload_C = 2e8;
    double rho = 0.04;
    double beta = 0.1;
    double gamma = 0.1;
    double s_min = 100.0;
    double s_max = 700.0;
    double s_step = 25.0;
    double area = 5000.0;
    double theta_db = 32.0;
    double path_loss_exp = 3.0;
    double d_min = 10.0;
};

// Per-vehicle replacements applied after generation; index matches vehicle order.
struct VehicleOverride {
    std::optional<double> kappa, zeta, workload_C, B, channel_h, c, rho, beta, gamma, delta,
        p_max, f_min, f_max;
};

struct SweepPlan {
    std::string axis;
    std::vector<double> values;
};

struct ScenarioSpec {
    GlobalParams global;
    FleetDefaults defaults;
    std::vector<VehicleOverride> vehicles;
    std::vector<double> size_grid;
    std::optional<SweepPlan> sweep;
    std::uint64_t seed = 42;
    std::string scheme = "Proposed";
};

struct GeneratedScenario {
    ScenarioConfig cfg;
    std::vector<double> distance;
    std::vector<double> fading;
    std::size_t rejections = 0;
    bool feasible_at_init = false;
};

// Power gain theta * d^-exponent * fading with theta given in dB.
double channel_gain(double theta_db, double exponent, double distance, double fading);

std::vector<double> make_size_grid(double s_min, double s_max, double step);

// Deterministic in (spec, seed). Fading draws are repeated up to max_redraws times
// while the fleet cannot be served at its smallest accurate size.
GeneratedScenario generate_scenario(const ScenarioSpec& spec, std::uint64_t seed,
                                    std::size_t max_redraws = 100);

// Whether every vehicle fits at its smallest accurate size, full power and top CPU speed.
bool admits_initial_allocation(const ScenarioConfig& cfg);

ScenarioSpec parse_config(const std::string& path);
ScenarioSpec parse_config_text(std::string_view text, const std::string& source = "<config>");

inline constexpr std::string_view kSweepAxes[] = {"B", "f_min", "s_min", "delta", "F", "T", "s_max"};
bool is_sweep_axis(std::string_view axis);

// Sets one sweep axis on an already generated scenario, leaving the channels unchanged.
void apply_axis(ScenarioConfig& cfg, const FleetDefaults& defaults, std::string_view axis,
                double value);

}  // namespace vemeta
