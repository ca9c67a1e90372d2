#include "vemeta/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vemeta/errors.hpp"

namespace vemeta {

namespace {

void require_positive(double x, const char* name) {
    if (!(x > 0.0)) throw DomainError(std::string(name) + " must be positive");
}

double rel_slack(double value, double bound) {
    double scale = std::max(std::abs(bound), std::numeric_limits<double>::min());
    return (bound - value) / scale;
}

}  // namespace

void validate(const ScenarioConfig& cfg) {
    if (cfg.vehicles.empty()) throw ConfigError("scenario has no vehicles");
    if (cfg.size_grid.empty()) throw ConfigError("size grid is empty");
    for (std::size_t i = 1; i < cfg.size_grid.size(); ++i)
        if (!(cfg.size_grid[i] > cfg.size_grid[i - 1]))
            throw ConfigError("size grid must be strictly ascending");
    if (!(cfg.size_grid.front() > 0.0)) throw ConfigError("size grid must be positive");
    if (!(cfg.T > 0.0)) throw ConfigError("T must be positive");
    if (!(cfg.F >= 0.0)) throw ConfigError("F must be nonnegative");
    if (!(cfg.sigma2 > 0.0)) throw ConfigError("sigma2 must be positive");
    if (!(cfg.phi > 0.0)) throw ConfigError("phi must be positive");
    if (!(cfg.kappa_ser > 0.0)) throw ConfigError("kappa_ser must be positive");
    if (!(cfg.acc_a > 0.0) || !(cfg.acc_b > 0.0)) throw ConfigError("accuracy constants must be positive");
    for (const auto& v : cfg.vehicles) {
        if (!(v.kappa > 0.0 && v.zeta > 0.0 && v.workload_C > 0.0 && v.bandwidth_B > 0.0 &&
              v.channel_h > 0.0 && v.cycles_per_bit_c > 0.0 && v.rho > 0.0 && v.beta > 0.0 &&
              v.gamma > 0.0 && v.p_max > 0.0 && v.f_min > 0.0 && v.f_max > 0.0))
            throw ConfigError("vehicle parameters must be positive");
        if (!(v.delta >= 0.0 && v.delta < 1.0)) throw ConfigError("delta must lie in [0, 1)");
        if (v.f_min > v.f_max) throw ConfigError("f_min exceeds f_max");
    }
}

bool ConstraintAudit::passed() const {
    if (!c3) return false;
    return std::all_of(vehicles.begin(), vehicles.end(),
                       [](const VehicleAudit& v) { return v.passed(); });
}

double conversion_time(double f, double workload_C) {
    require_positive(f, "CPU frequency");
    return workload_C / f;
}

double conversion_energy(double f, const VehicleProfile& v) {
    require_positive(f, "CPU frequency");
    return (v.kappa * f * f * f + v.zeta) * (v.workload_C / f);
}

double transmit_rate(double P, const VehicleProfile& v, double sigma2) {
    require_positive(P, "transmit power");
    double snr = P * v.channel_h / (v.bandwidth_B * sigma2);
    return v.bandwidth_B * std::log1p(snr) / std::log(2.0);
}

double comm_energy(double P, double s, double rate, double phi) {
    require_positive(rate, "transmit rate");
    return P * phi * s * s / rate;
}

double data_profit(double s, double rho, double phi) {
    if (s < 0.0) throw DomainError("size must be nonnegative");
    return rho * std::log1p(phi * s * s);
}

double server_time(double s, double c, double fs, double phi) {
    require_positive(fs, "server frequency");
    return phi * s * s * c / fs;
}

double server_energy(double fs, double s, double c, double kappa_ser, double phi) {
    require_positive(fs, "server frequency");
    return kappa_ser * fs * fs * phi * s * s * c;
}

double analytics_accuracy(double s, double acc_a, double acc_b) {
    if (s < 0.0) throw DomainError("size must be nonnegative");
    return 1.0 - acc_a * std::exp(-acc_b * s);
}

double min_size_for_accuracy(double delta, double acc_a, double acc_b) {
    if (!(delta < 1.0)) throw DomainError("accuracy target must be below one");
    return (std::log(acc_a) - std::log1p(-delta)) / acc_b;
}

double frame_latency(const VehicleProfile& v, const ScenarioConfig& cfg, double f, double P,
                     double s, double fs) {
    double x = cfg.phi * s * s;
    return conversion_time(f, v.workload_C) + x / transmit_rate(P, v, cfg.sigma2) +
           server_time(s, v.cycles_per_bit_c, fs, cfg.phi);
}

UtilityBreakdown vehicle_utility(const VehicleProfile& v, const ScenarioConfig& cfg, double f,
                                 double P, double s, double fs) {
    UtilityBreakdown u;
    u.profit = data_profit(s, v.rho, cfg.phi);
    u.e_cv = conversion_energy(f, v);
    u.e_com = comm_energy(P, s, transmit_rate(P, v, cfg.sigma2), cfg.phi);
    u.e_ser = server_energy(fs, s, v.cycles_per_bit_c, cfg.kappa_ser, cfg.phi);
    u.utility = u.profit - v.beta * u.e_ser - v.gamma * (u.e_cv + u.e_com);
    return u;
}

UtilityBreakdown energy_breakdown(const Allocation& a, const ScenarioConfig& cfg) {
    if (a.size() != cfg.size()) throw DomainError("allocation size does not match scenario");
    UtilityBreakdown total;
    for (std::size_t n = 0; n < cfg.size(); ++n) {
        auto u = vehicle_utility(cfg.vehicles[n], cfg, a.f[n], a.P[n], a.s[n], a.fs[n]);
        total.profit += u.profit;
        total.e_cv += u.e_cv;
        total.e_com += u.e_com;
        total.e_ser += u.e_ser;
        total.utility += u.utility;
    }
    return total;
}

double system_utility(const Allocation& a, const ScenarioConfig& cfg) {
    return energy_breakdown(a, cfg).utility;
}

ConstraintAudit audit_constraints(const Allocation& a, const ScenarioConfig& cfg, SizeMode mode,
                                  double tol) {
    ConstraintAudit audit;
    audit.worst_slack.fill(std::numeric_limits<double>::infinity());
    auto note = [&](Constraint c, double slack) {
        audit.worst_slack[c] = std::min(audit.worst_slack[c], slack);
    };
    const std::size_t n_veh = cfg.size();
    if (a.size() != n_veh || a.f.size() != n_veh || a.P.size() != n_veh || a.fs.size() != n_veh) {
        audit.c3 = false;
        audit.vehicles.assign(n_veh, VehicleAudit{false, false, false, false, false, false});
        return audit;
    }
    audit.vehicles.resize(n_veh);
    const double s_lo = cfg.s_min();
    const double s_hi = cfg.s_max();
    double fs_total = 0.0;
    for (std::size_t n = 0; n < n_veh; ++n) {
        const auto& v = cfg.vehicles[n];
        auto& va = audit.vehicles[n];
        double f = a.f[n], P = a.P[n], s = a.s[n], fs = a.fs[n];
        bool finite = std::isfinite(f) && std::isfinite(P) && std::isfinite(s) && std::isfinite(fs);

        double c1 = std::min(rel_slack(s_lo, s), rel_slack(s, s_hi));
        if (mode == SizeMode::Discrete) {
            auto it = std::lower_bound(cfg.size_grid.begin(), cfg.size_grid.end(), s);
            double dist = std::numeric_limits<double>::infinity();
            if (it != cfg.size_grid.end()) dist = std::min(dist, std::abs(*it - s));
            if (it != cfg.size_grid.begin()) dist = std::min(dist, std::abs(*(it - 1) - s));
            if (dist > tol * s_hi) c1 = std::min(c1, -dist / s_hi);
        }
        va.c1 = finite && c1 >= -tol;
        note(C1, c1);

        double c2 = std::min(rel_slack(v.f_min, f), rel_slack(f, v.f_max));
        va.c2 = finite && c2 >= -tol;
        note(C2, c2);

        double c4 = P > 0.0 ? rel_slack(P, v.p_max) : -1.0;
        va.c4 = finite && P > 0.0 && c4 >= -tol;
        note(C4, c4);

        double eps1 = min_size_for_accuracy(v.delta, cfg.acc_a, cfg.acc_b);
        double c5 = rel_slack(eps1, s);
        va.c5 = finite && c5 >= -tol;
        note(C5, c5);

        double c6 = -std::numeric_limits<double>::infinity();
        if (finite && f > 0.0 && P > 0.0 && fs > 0.0)
            c6 = rel_slack(frame_latency(v, cfg, f, P, s, fs), cfg.T);
        va.c6 = c6 >= -tol;
        note(C6, c6);

        va.c7 = finite && fs > 0.0;
        note(C7, cfg.F > 0.0 ? fs / cfg.F : fs);
        fs_total += fs;
    }
    double c3 = rel_slack(fs_total, cfg.F);
    if (cfg.F == 0.0) c3 = fs_total > 0.0 ? -1.0 : 0.0;
    audit.c3 = std::isfinite(fs_total) && c3 >= -tol;
    note(C3, c3);
    return audit;
}

}  // namespace vemeta
