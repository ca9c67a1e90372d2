#include "vemeta/server_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vemeta/errors.hpp"

namespace vemeta {

double ServerProblem::total_demand() const {
    return std::accumulate(demand.begin(), demand.end(), 0.0);
}

std::optional<std::vector<double>> server_demands(const Allocation& a, const ScenarioConfig& cfg) {
    std::vector<double> L(cfg.size());
    for (std::size_t n = 0; n < cfg.size(); ++n) {
        const auto& v = cfg.vehicles[n];
        double x = cfg.phi * a.s[n] * a.s[n];
        double window = cfg.T - conversion_time(a.f[n], v.workload_C) -
                        x / transmit_rate(a.P[n], v, cfg.sigma2);
        if (!(window > 0.0)) return std::nullopt;
        L[n] = x * v.cycles_per_bit_c / window;
    }
    return L;
}

ServerProblem make_server_problem(const Allocation& a, const ScenarioConfig& cfg) {
    auto L = server_demands(a, cfg);
    if (!L) throw InfeasibleError("no time left for server inference");
    ServerProblem prob;
    prob.demand = std::move(*L);
    prob.capacity = cfg.F;
    prob.fs_floor = 1e-6 * cfg.F;
    prob.energy_coeff.resize(cfg.size());
    for (std::size_t n = 0; n < cfg.size(); ++n) {
        const auto& v = cfg.vehicles[n];
        prob.energy_coeff[n] =
            v.beta * cfg.kappa_ser * cfg.phi * a.s[n] * a.s[n] * v.cycles_per_bit_c;
    }
    return prob;
}

std::vector<double> dual_primal_step(double nu, const std::vector<double>& mu,
                                     const ServerProblem& prob) {
    std::vector<double> fs(prob.size());
    for (std::size_t n = 0; n < prob.size(); ++n)
        fs[n] = std::max((mu[n] - nu) / (2.0 * prob.energy_coeff[n]), prob.fs_floor);
    return fs;
}

std::vector<double> dual_primal_step(const DualState& state, const ServerProblem& prob) {
    return dual_primal_step(state.nu, state.mu, prob);
}

Subgradient dual_subgradient(const std::vector<double>& fs, const ServerProblem& prob) {
    Subgradient g;
    g.g_nu = prob.capacity - std::accumulate(fs.begin(), fs.end(), 0.0);
    g.g_mu.resize(prob.size());
    for (std::size_t n = 0; n < prob.size(); ++n) g.g_mu[n] = fs[n] - prob.demand[n];
    return g;
}

double dual_function(double nu, const std::vector<double>& mu, const ServerProblem& prob) {
    auto fs = dual_primal_step(nu, mu, prob);
    double value = -nu * prob.capacity;
    for (std::size_t n = 0; n < prob.size(); ++n)
        value += prob.energy_coeff[n] * fs[n] * fs[n] + nu * fs[n] +
                 mu[n] * (prob.demand[n] - fs[n]);
    return value;
}

DualState cold_initial_state(const ServerProblem& prob, double varsigma) {
    DualState st;
    st.mu.assign(prob.size(), 0.0);
    st.varsigma = varsigma;
    return st;
}

DualState analytic_initial_state(const ServerProblem& prob, double varsigma) {
    DualState st = cold_initial_state(prob, varsigma);
    for (std::size_t n = 0; n < prob.size(); ++n)
        st.mu[n] = 2.0 * prob.energy_coeff[n] * prob.demand[n];
    return st;
}

DualResult solve_server_dual(const ServerProblem& prob, DualState state, const DualOptions& opts) {
    if (prob.total_demand() > prob.capacity * (1.0 + kFeasTol) || !(prob.capacity > 0.0))
        throw InfeasibleError("server demand exceeds capacity");
    const std::size_t N = prob.size();
    if (state.mu.size() != N) state.mu.assign(N, 0.0);

    // Multipliers are compared on the scale they take at the optimum.
    std::vector<double> mu_ref(N);
    double nu_ref = 0.0;
    double inv_curv = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
        double two_a = 2.0 * prob.energy_coeff[n];
        mu_ref[n] = std::max(two_a * prob.demand[n], two_a * prob.fs_floor);
        nu_ref = std::max(nu_ref, mu_ref[n]);
        inv_curv += 1.0 / two_a;
    }

    DualResult res;
    auto record = [&](const std::vector<double>& fs) {
        if (opts.record_trace) res.trace.push_back({state.iter, state.nu, state.mu, fs});
    };

    std::vector<double> fs = dual_primal_step(state, prob);
    record(fs);
    while (state.iter < opts.max_iter) {
        double eta = opts.rule == StepRule::Diminishing
                         ? opts.eta0 / (1.0 + static_cast<double>(state.iter))
                         : opts.eta0;
        state.step_i = eta / inv_curv;
        state.step_j = eta;
        Subgradient g = dual_subgradient(fs, prob);

        double nu_next = std::max(0.0, state.nu - state.step_i * g.g_nu);
        double dnu = std::abs(nu_next - state.nu) / nu_ref;
        double dmu = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            double step = state.step_j * 2.0 * prob.energy_coeff[n];
            double mu_next = std::max(0.0, state.mu[n] - step * g.g_mu[n]);
            dmu = std::max(dmu, std::abs(mu_next - state.mu[n]) / mu_ref[n]);
            state.mu[n] = mu_next;
        }
        state.nu = nu_next;
        ++state.iter;
        fs = dual_primal_step(state, prob);
        record(fs);
        if (dnu < state.varsigma && dmu < state.varsigma) {
            res.converged = true;
            break;
        }
    }
    res.fs = std::move(fs);
    res.state = std::move(state);
    return res;
}

std::optional<std::vector<double>> server_analytic_solution(const ServerProblem& prob) {
    if (prob.total_demand() > prob.capacity * (1.0 + kFeasTol)) return std::nullopt;
    return prob.demand;
}

double server_objective(const std::vector<double>& fs, const ServerProblem& prob) {
    double total = 0.0;
    for (std::size_t n = 0; n < prob.size(); ++n)
        total += prob.energy_coeff[n] * fs[n] * fs[n];
    return total;
}

}  // namespace vemeta
