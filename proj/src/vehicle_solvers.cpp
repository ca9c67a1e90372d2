#include "vemeta/vehicle_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vemeta/errors.hpp"

namespace vemeta {

namespace {

// Rate in bit/s that also accepts P = 0.
double rate_at(double P, const VehicleProfile& v, double sigma2) {
    return v.bandwidth_B * std::log1p(P * v.channel_h / (v.bandwidth_B * sigma2)) / std::numbers::ln2;
}

}  // namespace

SizeContext make_size_context(const VehicleProfile& v, const ScenarioConfig& cfg, double f,
                              double P, double fs) {
    return SizeContext{f, P, fs, transmit_rate(P, v, cfg.sigma2)};
}

double size_cost_coefficient(const VehicleProfile& v, const ScenarioConfig& cfg,
                             const SizeContext& ctx) {
    return v.beta * cfg.kappa_ser * ctx.fs * ctx.fs * v.cycles_per_bit_c + v.gamma * ctx.P / ctx.rate;
}

double size_objective(double s, const VehicleProfile& v, const ScenarioConfig& cfg,
                      const SizeContext& ctx) {
    double x = cfg.phi * s * s;
    return v.rho * std::log1p(x) - size_cost_coefficient(v, cfg, ctx) * x;
}

double size_stationary_point(const VehicleProfile& v, const ScenarioConfig& cfg,
                             const SizeContext& ctx, bool paper_variant) {
    double A = size_cost_coefficient(v, cfg, ctx);
    double ratio = v.rho / (cfg.phi * A);
    if (paper_variant) ratio /= std::numbers::ln2;
    return std::sqrt(std::max(0.0, ratio - 1.0 / cfg.phi));
}

SizeBounds size_bounds(const VehicleProfile& v, const ScenarioConfig& cfg, const SizeContext& ctx) {
    SizeBounds b;
    b.eps1 = min_size_for_accuracy(v.delta, cfg.acc_a, cfg.acc_b);
    b.lower = std::max(cfg.s_min(), b.eps1);
    double window = cfg.T - conversion_time(ctx.f, v.workload_C);
    if (!(window > 0.0)) {
        b.eps2 = 0.0;
        b.upper = 0.0;
        b.feasible = false;
        return b;
    }
    double R = ctx.rate;
    double fs = ctx.fs;
    if (std::isinf(fs))
        b.eps2 = std::sqrt(window * R / cfg.phi);
    else
        b.eps2 = std::sqrt(window * R * fs / (cfg.phi * fs + cfg.phi * v.cycles_per_bit_c * R));
    b.upper = std::min(cfg.s_max(), b.eps2);
    b.feasible = leq_tol(b.lower, b.upper);
    return b;
}

std::optional<double> solve_size_continuous(const VehicleProfile& v, const ScenarioConfig& cfg,
                                            const SizeContext& ctx, bool paper_variant) {
    SizeBounds b = size_bounds(v, cfg, ctx);
    if (!b.feasible) return std::nullopt;
    double s = size_stationary_point(v, cfg, ctx, paper_variant);
    return std::clamp(s, b.lower, std::max(b.lower, b.upper));
}

std::optional<double> solve_size_discrete(double s_cont, std::span<const double> grid, double lower,
                                          double upper, const std::function<double(double)>& obj) {
    if (grid.empty()) return std::nullopt;
    auto admissible = [&](double g) {
        return g >= lower - kFeasTol * std::abs(lower) && leq_tol(g, upper);
    };
    const std::size_t M = grid.size();
    if (M == 1) {
        if (admissible(grid[0])) return grid[0];
        return std::nullopt;
    }

    std::size_t hi;
    if (s_cont <= grid[0]) {
        hi = 0;
    } else if (s_cont >= grid[M - 1]) {
        hi = M - 1;
    } else {
        std::size_t a = 0, b = M - 1;
        while (b - a > 1) {
            std::size_t mid = a + (b - a) / 2;
            if (grid[mid] == s_cont) {
                a = b = mid;
                break;
            }
            if (grid[mid] < s_cont)
                a = mid;
            else
                b = mid;
        }
        if (grid[a] == s_cont && admissible(grid[a])) return grid[a];
        if (grid[b] == s_cont && admissible(grid[b])) return grid[b];
        hi = b;
    }

    std::optional<double> best;
    double best_val = -std::numeric_limits<double>::infinity();
    for (std::size_t idx : {hi == 0 ? std::size_t{0} : hi - 1, hi}) {
        double g = grid[idx];
        if (!admissible(g)) continue;
        double val = obj(g);
        if (!best || val > best_val + 1e-12 * std::max(1.0, std::abs(best_val))) {
            best = g;
            best_val = val;
        }
    }
    if (best) return best;

    // The neighbours can both fall outside the window when it contains no grid
    // point near s_cont; fall back to the admissible grid point nearest to it.
    double nearest_dist = std::numeric_limits<double>::infinity();
    for (double g : grid) {
        if (!admissible(g)) continue;
        double d = std::abs(g - s_cont);
        if (d < nearest_dist) {
            nearest_dist = d;
            best = g;
        }
    }
    return best;
}

PowerBracket power_lower_bound(const VehicleProfile& v, const ScenarioConfig& cfg, double s,
                               double f, double fs) {
    PowerBracket b;
    b.p_max = v.p_max;
    double x = cfg.phi * s * s;
    double denom = (cfg.T - conversion_time(f, v.workload_C)) * fs - v.cycles_per_bit_c * x;
    if (!(denom > 0.0)) {
        b.rate_requirement = std::numeric_limits<double>::infinity();
        b.q_n = std::numeric_limits<double>::infinity();
        b.feasible = false;
        return b;
    }
    b.rate_requirement = x * fs / denom;
    double B = v.bandwidth_B;
    b.q_n = std::expm1(b.rate_requirement / B * std::numbers::ln2) * B * cfg.sigma2 / v.channel_h;
    b.feasible = std::isfinite(b.q_n) && leq_tol(b.q_n, b.p_max);
    if (b.feasible) b.q_n = std::min(b.q_n, b.p_max);
    return b;
}

double power_ratio(double P, const VehicleProfile& v, const ScenarioConfig& cfg, double s) {
    return v.gamma * cfg.phi * s * s * P / transmit_rate(P, v, cfg.sigma2);
}

ParametricMin parametric_power_min(double t, const PowerBracket& bracket, const VehicleProfile& v,
                                   const ScenarioConfig& cfg, double s) {
    if (!bracket.feasible) throw InfeasibleError("power bracket is empty");
    double w = v.gamma * cfg.phi * s * s;
    double B = v.bandwidth_B;
    double P;
    if (w > 0.0) {
        double stationary = t * B / (w * std::numbers::ln2) - B * cfg.sigma2 / v.channel_h;
        P = std::clamp(stationary, bracket.q_n, bracket.p_max);
    } else {
        P = t > 0.0 ? bracket.p_max : bracket.q_n;
    }
    return ParametricMin{P, w * P - t * rate_at(P, v, cfg.sigma2)};
}

PowerResult solve_power_bisection(const PowerBracket& bracket, const VehicleProfile& v,
                                  const ScenarioConfig& cfg, double s, double eps,
                                  std::size_t max_iter) {
    if (!bracket.feasible) throw InfeasibleError("transmit power problem has no solution");
    PowerResult res;
    if (s == 0.0) {
        res.P = bracket.q_n;
        res.converged = true;
        return res;
    }
    double t_lower = 0.0;
    double t_upper = power_ratio(bracket.p_max, v, cfg, s);
    std::optional<double> best;
    res.trace.push_back({0, t_lower, t_upper});
    while (t_upper - t_lower > eps) {
        if (res.iterations == max_iter) break;
        ++res.iterations;
        double t = 0.5 * (t_lower + t_upper);
        ParametricMin pm = parametric_power_min(t, bracket, v, cfg, s);
        if (pm.value <= 0.0) {
            t_upper = t;
            best = pm.P;
            res.final_case = 0;
        } else {
            t_lower = t;
            res.final_case = 1;
        }
        res.trace.push_back({res.iterations, t_lower, t_upper});
    }
    res.converged = t_upper - t_lower <= eps;
    if (res.final_case == 1 || !best) best = parametric_power_min(t_upper, bracket, v, cfg, s).P;
    res.P = *best;
    return res;
}

double cpu_energy_minimizer(const VehicleProfile& v, bool paper_variant) {
    double num = paper_variant ? v.zeta * v.workload_C : v.zeta;
    return std::cbrt(num / (2.0 * v.kappa));
}

std::optional<double> solve_cpu(const VehicleProfile& v, const ScenarioConfig& cfg, double s,
                                double P, double fs, double rate, bool paper_variant) {
    (void)P;
    double x = cfg.phi * s * s;
    double tau_max = cfg.T - x / rate - x * v.cycles_per_bit_c / fs;
    if (!(tau_max > 0.0)) return std::nullopt;
    double D = std::max(v.workload_C / tau_max, v.f_min);
    if (!leq_tol(D, v.f_max)) return std::nullopt;
    D = std::min(D, v.f_max);
    return std::clamp(cpu_energy_minimizer(v, paper_variant), D, v.f_max);
}

}  // namespace vemeta
