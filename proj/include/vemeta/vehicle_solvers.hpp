#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "vemeta/model.hpp"

namespace vemeta {

// Variables held fixed while the size of one vehicle is optimized.
struct SizeContext {
    double f = 0.0;
    double P = 0.0;
    double fs = 0.0;
    double rate = 0.0;
};

SizeContext make_size_context(const VehicleProfile& v, const ScenarioConfig& cfg, double f,
                              double P, double fs);

struct SizeBounds {
    double eps1 = 0.0;
    double eps2 = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool feasible = false;
};

// Marginal cost per transmitted bit of a larger frame.
double size_cost_coefficient(const VehicleProfile& v, const ScenarioConfig& cfg,
                             const SizeContext& ctx);
double size_objective(double s, const VehicleProfile& v, const ScenarioConfig& cfg,
                      const SizeContext& ctx);
double size_stationary_point(const VehicleProfile& v, const ScenarioConfig& cfg,
                             const SizeContext& ctx, bool paper_variant = false);
SizeBounds size_bounds(const VehicleProfile& v, const ScenarioConfig& cfg, const SizeContext& ctx);
std::optional<double> solve_size_continuous(const VehicleProfile& v, const ScenarioConfig& cfg,
                                            const SizeContext& ctx, bool paper_variant = false);

// Brackets s_cont on the grid by binary search and returns the better of the two
// neighbours that fall inside [lower, upper].
std::optional<double> solve_size_discrete(double s_cont, std::span<const double> grid, double lower,
                                          double upper, const std::function<double(double)>& obj);

struct PowerBracket {
    double q_n = 0.0;
    double p_max = 0.0;
    double rate_requirement = 0.0;
    bool feasible = false;
};

PowerBracket power_lower_bound(const VehicleProfile& v, const ScenarioConfig& cfg, double s,
                               double f, double fs);

// Energy-per-bit ratio minimized by the power block.
double power_ratio(double P, const VehicleProfile& v, const ScenarioConfig& cfg, double s);

struct ParametricMin {
    double P = 0.0;
    double value = 0.0;
};

ParametricMin parametric_power_min(double t, const PowerBracket& bracket, const VehicleProfile& v,
                                   const ScenarioConfig& cfg, double s);

struct BisectionStep {
    std::size_t iter = 0;
    double t_lower = 0.0;
    double t_upper = 0.0;
};

struct PowerResult {
    double P = 0.0;
    std::size_t iterations = 0;
    int final_case = 0;
    bool converged = false;
    std::vector<BisectionStep> trace;
};

PowerResult solve_power_bisection(const PowerBracket& bracket, const VehicleProfile& v,
                                  const ScenarioConfig& cfg, double s, double eps = 1e-8,
                                  std::size_t max_iter = 200);

double cpu_energy_minimizer(const VehicleProfile& v, bool paper_variant = false);

std::optional<double> solve_cpu(const VehicleProfile& v, const ScenarioConfig& cfg, double s,
                                double P, double fs, double rate, bool paper_variant = false);

}  // namespace vemeta
