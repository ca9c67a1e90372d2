#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "vemeta/joint.hpp"
#include "vemeta/scenario.hpp"
#include "vemeta/server_solver.hpp"
#include "vemeta/vehicle_solvers.hpp"

namespace vemeta {

struct ExperimentRecord {
    std::string axis;
    double value = 0.0;
    SchemeId scheme = SchemeId::Proposed;
    std::uint64_t seed = 0;
    bool feasible = false;
    bool converged = false;
    double utility = 0.0;
    double e_cv = 0.0;
    double e_com = 0.0;
    double e_ser = 0.0;
    std::size_t outer_iters = 0;
    double wall_ms = 0.0;
};

struct SweepRequest {
    ScenarioSpec spec;
    std::string axis;
    std::vector<double> values;
    std::vector<SchemeId> schemes{kAllSchemes.begin(), kAllSchemes.end()};
    std::vector<std::uint64_t> seeds;
    SolverOptions options;
    bool measure_wall_time = false;
    unsigned threads = 0;  // 0 selects thread_cap()
};

// VEMETA_THREADS when set to a positive integer, otherwise the hardware concurrency.
unsigned thread_cap();

// Rows come back ordered by (value, scheme, seed) in request order.
std::vector<ExperimentRecord> run_sweep(const SweepRequest& req);

std::string format_number(double x);
std::string csv_escape(const std::string& field);
void write_sweep_csv(std::ostream& out, const std::vector<ExperimentRecord>& rows);

nlohmann::json report_to_json(const SolveReport& rep, const ScenarioConfig& cfg, SchemeId scheme,
                              const GeneratedScenario* gen = nullptr);
void write_trace_csv(std::ostream& out, const SolveReport& rep);

// Convergence traces computed at the converged allocation of the proposed scheme.
void write_power_trace(std::ostream& out, const PowerResult& res);
void write_dual_trace(std::ostream& out, const DualResult& res,
                      const std::vector<std::size_t>& vehicles);
void write_utility_trace(std::ostream& out, const SolveReport& rep);

// Four distinct vehicle indices (fewer for small fleets) drawn with the given seed.
std::vector<std::size_t> sample_vehicles(std::size_t n_vehicles, std::size_t count,
                                         std::uint64_t seed);

}  // namespace vemeta
