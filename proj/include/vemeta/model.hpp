#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace vemeta {

struct VehicleProfile {
    double kappa = 1e-27;
    double zeta = 1.0;
    double workload_C = 2e8;
    double bandwidth_B = 1e7;
    double channel_h = 1.0;
    double cycles_per_bit_c = 2.95;
    double rho = 0.04;
    double beta = 0.1;
    double gamma = 0.1;
    double delta = 0.85;
    double p_max = 2.0;
    double f_min = 0.5e9;
    double f_max = 2e9;
};

struct ScenarioConfig {
    std::vector<VehicleProfile> vehicles;
    double T = 1.0;
    double F = 2.5e9;
    double sigma2 = 3.981071705534972e-21;
    double phi = 24.0;
    double kappa_ser = 1e-27;
    double acc_a = 1.578;
    double acc_b = 6.5e-3;
    std::vector<double> size_grid;
    std::uint64_t rng_seed = 0;

    std::size_t size() const { return vehicles.size(); }
    double s_min() const { return size_grid.front(); }
    double s_max() const { return size_grid.back(); }
};

// Throws ConfigError when the configuration breaks a structural invariant.
void validate(const ScenarioConfig& cfg);

struct Allocation {
    std::vector<double> f;
    std::vector<double> P;
    std::vector<double> s;
    std::vector<double> fs;

    Allocation() = default;
    explicit Allocation(std::size_t n) : f(n), P(n), s(n), fs(n) {}
    std::size_t size() const { return s.size(); }
};

enum class SizeMode { Discrete, Continuous };

// Relative tolerance used for every feasibility comparison in the library.
inline constexpr double kFeasTol = 1e-9;
// Tighter tolerance for the audit, which only has to absorb rounding.
inline constexpr double kAuditTol = 1e-12;

inline bool leq_tol(double a, double b, double tol = kFeasTol) {
    return a <= b + tol * (b < 0 ? -b : b);
}

enum Constraint : std::size_t { C1 = 0, C2, C3, C4, C5, C6, C7, kConstraintCount };

struct VehicleAudit {
    bool c1 = true, c2 = true, c4 = true, c5 = true, c6 = true, c7 = true;
    bool passed() const { return c1 && c2 && c4 && c5 && c6 && c7; }
};

// Slacks are expressed relative to the bound they are measured against, so a
// negative value means the constraint is violated by that fraction.
struct ConstraintAudit {
    std::vector<VehicleAudit> vehicles;
    bool c3 = true;
    std::array<double, kConstraintCount> worst_slack{};

    bool passed() const;
};

double conversion_time(double f, double workload_C);
double conversion_energy(double f, const VehicleProfile& v);
double transmit_rate(double P, const VehicleProfile& v, double sigma2);
double comm_energy(double P, double s, double rate, double phi);
double data_profit(double s, double rho, double phi);
double server_time(double s, double c, double fs, double phi);
double server_energy(double fs, double s, double c, double kappa_ser, double phi);
double analytics_accuracy(double s, double acc_a, double acc_b);
double min_size_for_accuracy(double delta, double acc_a, double acc_b);

// Total per-frame latency of one vehicle: conversion, upload and inference.
double frame_latency(const VehicleProfile& v, const ScenarioConfig& cfg, double f, double P,
                     double s, double fs);

struct UtilityBreakdown {
    double profit = 0.0;
    double e_cv = 0.0;
    double e_com = 0.0;
    double e_ser = 0.0;
    double utility = 0.0;
};

UtilityBreakdown vehicle_utility(const VehicleProfile& v, const ScenarioConfig& cfg, double f,
                                 double P, double s, double fs);
UtilityBreakdown energy_breakdown(const Allocation& a, const ScenarioConfig& cfg);
double system_utility(const Allocation& a, const ScenarioConfig& cfg);

ConstraintAudit audit_constraints(const Allocation& a, const ScenarioConfig& cfg,
                                  SizeMode mode = SizeMode::Discrete, double tol = kAuditTol);

}  // namespace vemeta
