#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "vemeta/model.hpp"

namespace vemeta {

// Server allocation problem: minimize sum a_n fs_n^2 subject to sum fs_n <= capacity
// and fs_n >= demand_n.
struct ServerProblem {
    std::vector<double> energy_coeff;
    std::vector<double> demand;
    double capacity = 0.0;
    double fs_floor = 0.0;

    std::size_t size() const { return demand.size(); }
    double total_demand() const;
};

// Latency floors L_n given (s, P, f); empty when some vehicle has no time left
// for inference.
std::optional<std::vector<double>> server_demands(const Allocation& a, const ScenarioConfig& cfg);

// Throws InfeasibleError when server_demands is empty.
ServerProblem make_server_problem(const Allocation& a, const ScenarioConfig& cfg);

struct DualState {
    double nu = 0.0;
    std::vector<double> mu;
    double step_i = 0.0;
    double step_j = 0.0;
    std::size_t iter = 0;
    double varsigma = 1e-9;
};

enum class StepRule { Diminishing, Constant };

struct DualOptions {
    std::size_t max_iter = 10000;
    double varsigma = 1e-9;
    double eta0 = 1.0;
    StepRule rule = StepRule::Diminishing;
    bool record_trace = false;
};

struct Subgradient {
    double g_nu = 0.0;
    std::vector<double> g_mu;
};

struct DualTracePoint {
    std::size_t iter = 0;
    double nu = 0.0;
    std::vector<double> mu;
    std::vector<double> fs;
};

struct DualResult {
    std::vector<double> fs;
    DualState state;
    std::vector<DualTracePoint> trace;
    bool converged = false;
};

std::vector<double> dual_primal_step(double nu, const std::vector<double>& mu,
                                     const ServerProblem& prob);
std::vector<double> dual_primal_step(const DualState& state, const ServerProblem& prob);
Subgradient dual_subgradient(const std::vector<double>& fs, const ServerProblem& prob);

// Lagrange dual function, evaluated by exact minimization over fs >= fs_floor.
double dual_function(double nu, const std::vector<double>& mu, const ServerProblem& prob);

DualState cold_initial_state(const ServerProblem& prob, double varsigma = 1e-9);
// Multipliers at which the primal step returns the demands exactly.
DualState analytic_initial_state(const ServerProblem& prob, double varsigma = 1e-9);

DualResult solve_server_dual(const ServerProblem& prob, DualState state0,
                             const DualOptions& opts = {});

std::optional<std::vector<double>> server_analytic_solution(const ServerProblem& prob);
double server_objective(const std::vector<double>& fs, const ServerProblem& prob);

}  // namespace vemeta
