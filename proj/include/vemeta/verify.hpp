#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "vemeta/model.hpp"

namespace vemeta::verify {

enum class GridScale { Linear, Log };
enum class Direction { Min, Max };

struct GridSpec {
    double lower = 0.0;
    double upper = 1.0;
    std::size_t points = 1000000;
    GridScale scale = GridScale::Linear;
};

struct GridOptimum {
    double x = 0.0;
    double value = 0.0;
    // Spacing of the coarse grid around x; the oracle is exact to within this.
    double step = 0.0;
};

// Exhaustive search followed by one 1000-point refinement around the incumbent.
GridOptimum grid_argopt(const std::function<double(double)>& objective, const GridSpec& spec,
                        Direction direction);

struct QuasiconvexWitness {
    double x1, x2, x3;
    double f1, f2, f3;
};

struct QuasiconvexCheck {
    bool passed = true;
    std::size_t trials = 0;
    std::optional<QuasiconvexWitness> witness;
};

QuasiconvexCheck check_quasiconvex(const std::function<double(double)>& fn, double lower,
                                   double upper, std::size_t samples, std::uint64_t seed,
                                   double tol = 1e-12);

struct SubgradientWitness {
    std::vector<double> point;
    double slack = 0.0;
};

struct SubgradientCheck {
    bool passed = true;
    std::size_t trials = 0;
    double worst_slack = 0.0;
    std::optional<SubgradientWitness> witness;
};

// neg_dual is the convex function -D; spread gives the per-coordinate sampling scale.
SubgradientCheck check_subgradient_inequality(
    const std::function<double(const std::vector<double>&)>& neg_dual,
    const std::vector<double>& point, const std::vector<double>& g,
    const std::vector<double>& spread, std::size_t trials, std::uint64_t seed, double tol = 1e-9);

struct OracleGrid {
    std::size_t points = 50;
};

struct OracleResult {
    double utility = 0.0;
    Allocation allocation;
};

// Cross-product search over (s, P, f, fs) for at most two vehicles.
std::optional<OracleResult> exhaustive_joint_oracle(const ScenarioConfig& cfg,
                                                    const OracleGrid& grid = {});

}  // namespace vemeta::verify
