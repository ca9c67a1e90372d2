#include "vemeta/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "vemeta/errors.hpp"

namespace vemeta::verify {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double grid_point(const GridSpec& g, std::size_t k) {
    double frac = static_cast<double>(k) / static_cast<double>(g.points - 1);
    if (g.scale == GridScale::Log)
        return std::exp(std::log(g.lower) + frac * (std::log(g.upper) - std::log(g.lower)));
    return g.lower + frac * (g.upper - g.lower);
}

struct Scan {
    std::size_t index = 0;
    double x = 0.0;
    double value = 0.0;
};

Scan scan(const std::function<double(double)>& objective, const GridSpec& g, Direction dir) {
    Scan best;
    bool have = false;
    for (std::size_t k = 0; k < g.points; ++k) {
        double x = grid_point(g, k);
        double v = objective(x);
        if (std::isnan(v)) continue;
        bool better = dir == Direction::Min ? v < best.value : v > best.value;
        if (!have || better) {
            best = {k, x, v};
            have = true;
        }
    }
    if (!have) throw DomainError("objective is undefined on the whole grid");
    return best;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    return out;
}

std::vector<double> geomspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        double frac = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
        out[k] = std::exp(std::log(lo) + frac * (std::log(hi) - std::log(lo)));
    }
    return out;
}

}  // namespace

GridOptimum grid_argopt(const std::function<double(double)>& objective, const GridSpec& spec,
                        Direction direction) {
    if (!(spec.lower < spec.upper) || spec.points < 3)
        throw DomainError("grid needs lower < upper and at least three points");
    if (spec.scale == GridScale::Log && !(spec.lower > 0.0))
        throw DomainError("logarithmic grid needs a positive lower bound");

    Scan coarse = scan(objective, spec, direction);
    std::size_t lo_k = coarse.index == 0 ? 0 : coarse.index - 1;
    std::size_t hi_k = std::min(coarse.index + 1, spec.points - 1);
    double lo = grid_point(spec, lo_k);
    double hi = grid_point(spec, hi_k);

    GridOptimum out{coarse.x, coarse.value, (hi - lo) / 2.0};
    if (hi > lo) {
        GridSpec fine{lo, hi, 1000, GridScale::Linear};
        Scan refined = scan(objective, fine, direction);
        bool better = direction == Direction::Min ? refined.value < out.value
                                                  : refined.value > out.value;
        if (better) {
            out.x = refined.x;
            out.value = refined.value;
        }
    }
    return out;
}

QuasiconvexCheck check_quasiconvex(const std::function<double(double)>& fn, double lower,
                                   double upper, std::size_t samples, std::uint64_t seed,
                                   double tol) {
    QuasiconvexCheck res;
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < samples; ++i) {
        double p[3];
        for (double& x : p) x = lower + (upper - lower) * uniform01(rng);
        std::sort(p, p + 3);
        double f1 = fn(p[0]), f2 = fn(p[1]), f3 = fn(p[2]);
        ++res.trials;
        if (f2 > std::max(f1, f3) + tol) {
            res.passed = false;
            res.witness = QuasiconvexWitness{p[0], p[1], p[2], f1, f2, f3};
            break;
        }
    }
    return res;
}

SubgradientCheck check_subgradient_inequality(
    const std::function<double(const std::vector<double>&)>& neg_dual,
    const std::vector<double>& point, const std::vector<double>& g,
    const std::vector<double>& spread, std::size_t trials, std::uint64_t seed, double tol) {
    SubgradientCheck res;
    res.worst_slack = std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(seed);
    const double base = neg_dual(point);
    std::vector<double> other(point.size());
    for (std::size_t t = 0; t < trials; ++t) {
        double lin = 0.0;
        for (std::size_t k = 0; k < point.size(); ++k) {
            double offset = (2.0 * uniform01(rng) - 1.0) * spread[k];
            other[k] = std::max(0.0, point[k] + offset);
            lin += g[k] * (other[k] - point[k]);
        }
        double slack = neg_dual(other) - (base + lin);
        ++res.trials;
        res.worst_slack = std::min(res.worst_slack, slack);
        if (slack < -tol && res.passed) {
            res.passed = false;
            res.witness = SubgradientWitness{other, slack};
        }
    }
    return res;
}

std::optional<OracleResult> exhaustive_joint_oracle(const ScenarioConfig& cfg,
                                                    const OracleGrid& grid) {
    const std::size_t N = cfg.size();
    if (N < 1 || N > 2) throw DomainError("exhaustive oracle supports one or two vehicles");
    if (cfg.size_grid.size() > 8) throw DomainError("exhaustive oracle supports at most 8 sizes");
    if (!(cfg.F > 0.0)) return std::nullopt;

    const std::size_t K = grid.points;
    std::vector<double> fs_grid = linspace(cfg.F / static_cast<double>(K), cfg.F, K);

    // Vehicles interact only through the capacity sum, so the best (s, P, f) for
    // each vehicle and each fs value can be tabulated first.
    struct Best {
        double utility = -std::numeric_limits<double>::infinity();
        double s = 0.0, P = 0.0, f = 0.0;
    };
    std::vector<std::vector<Best>> table(N, std::vector<Best>(K));
    for (std::size_t n = 0; n < N; ++n) {
        const auto& v = cfg.vehicles[n];
        std::vector<double> P_grid = geomspace(v.p_max * 1e-9, v.p_max, K);
        std::vector<double> f_grid = linspace(v.f_min, v.f_max, K);
        double acc_floor = (std::log(cfg.acc_a) - std::log1p(-v.delta)) / cfg.acc_b;
        for (std::size_t k = 0; k < K; ++k) {
            double fs = fs_grid[k];
            Best& best = table[n][k];
            for (double s : cfg.size_grid) {
                if (s < acc_floor * (1.0 - kFeasTol)) continue;
                double x = cfg.phi * s * s;
                for (double P : P_grid) {
                    double R = v.bandwidth_B *
                               std::log2(1.0 + P * v.channel_h / (v.bandwidth_B * cfg.sigma2));
                    for (double f : f_grid) {
                        double latency = v.workload_C / f + x / R + x * v.cycles_per_bit_c / fs;
                        if (latency > cfg.T * (1.0 + kFeasTol)) continue;
                        double e_cv = (v.kappa * f * f * f + v.zeta) * v.workload_C / f;
                        double e_com = P * x / R;
                        double e_ser = cfg.kappa_ser * fs * fs * x * v.cycles_per_bit_c;
                        double u = v.rho * std::log(1.0 + x) - v.beta * e_ser -
                                   v.gamma * (e_cv + e_com);
                        if (u > best.utility) best = {u, s, P, f};
                    }
                }
            }
        }
    }

    std::optional<OracleResult> out;
    auto consider = [&](const std::vector<std::size_t>& ks) {
        double total_fs = 0.0, total_u = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            const Best& b = table[n][ks[n]];
            if (!std::isfinite(b.utility)) return;
            total_fs += fs_grid[ks[n]];
            total_u += b.utility;
        }
        if (total_fs > cfg.F * (1.0 + kFeasTol)) return;
        if (out && total_u <= out->utility) return;
        OracleResult r{total_u, Allocation(N)};
        for (std::size_t n = 0; n < N; ++n) {
            const Best& b = table[n][ks[n]];
            r.allocation.s[n] = b.s;
            r.allocation.P[n] = b.P;
            r.allocation.f[n] = b.f;
            r.allocation.fs[n] = fs_grid[ks[n]];
        }
        out = std::move(r);
    };
    if (N == 1) {
        for (std::size_t a = 0; a < K; ++a) consider({a});
    } else {
        for (std::size_t a = 0; a < K; ++a)
            for (std::size_t b = 0; b < K; ++b) consider({a, b});
    }
    return out;
}

}  // namespace vemeta::verify
