#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vemeta/model.hpp"

namespace vemeta {

enum class SchemeId { Proposed, FCMS, FSCP, FARC };

std::string_view scheme_name(SchemeId id);
std::optional<SchemeId> parse_scheme(std::string_view name);
inline constexpr std::array<SchemeId, 4> kAllSchemes{SchemeId::Proposed, SchemeId::FCMS,
                                                     SchemeId::FSCP, SchemeId::FARC};

enum class Block { Size, Power, Cpu, Server };

struct SolverOptions {
    double xi = 1e-4;
    std::size_t max_outer = 50;
    double power_eps = 1e-8;
    std::size_t power_max_iter = 200;
    double varsigma = 1e-9;
    std::size_t dual_max_iter = 10000;
    bool paper_formula_variants = false;
    std::array<Block, 4> order{Block::Size, Block::Power, Block::Cpu, Block::Server};
};

// Blocks that stay frozen at the given per-vehicle values.
struct PartialAllocation {
    std::optional<std::vector<double>> f;
    std::optional<std::vector<double>> s;
    std::optional<std::vector<double>> fs;
};

PartialAllocation default_fixing(const ScenarioConfig& cfg, SchemeId scheme);

struct BlockDiagnostics {
    std::size_t power_iters_max = 0;
    bool power_converged = true;
    std::size_t dual_iters = 0;
    bool dual_converged = true;
};

struct SolveReport {
    std::vector<double> utility_trace;
    std::vector<Allocation> allocations;
    std::size_t outer_iters = 0;
    bool converged = false;
    bool feasible = false;
    std::string failure;
    std::vector<BlockDiagnostics> diagnostics;
    ConstraintAudit audit;
    UtilityBreakdown breakdown;

    const Allocation& final_allocation() const { return allocations.back(); }
};

// Throws InfeasibleError when no starting point satisfies the constraints.
Allocation initialize(const ScenarioConfig& cfg, const SolverOptions& opts = {},
                      const PartialAllocation& fixed = {});

SolveReport joint_solve(const ScenarioConfig& cfg, const SolverOptions& opts = {},
                        const PartialAllocation& fixed = {},
                        const Allocation* warm_start = nullptr);

SolveReport solve_scheme(const ScenarioConfig& cfg, SchemeId scheme,
                         const SolverOptions& opts = {},
                         const std::optional<PartialAllocation>& fixed = std::nullopt);

}  // namespace vemeta
