#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "bellvar/bell.hpp"

namespace bellvar {

struct OptimizerConfig {
    /// Coarse grid resolution per angle over [0, 2pi). Unset means 9 in
    /// plane mode and 7 in bloch mode (8 angles there).
    std::optional<int> coarse_grid_points_per_axis;
    int refine_seeds = 16;
    int max_refine_iterations = 400;
    double convergence_tolerance = 1e-9;
    ObservableMode observable_mode = ObservableMode::plane;
    std::uint64_t rng_seed = 0;
    /// Worker threads; 0 means hardware concurrency. Does not affect results.
    unsigned jobs = 1;

    int grid_points() const;
    /// Throws DomainError on grid < 3, seeds < 1, iterations < 1 or tol <= 0.
    void validate() const;
};

struct ViolationResult {
    double b_max = 0.0;
    MeasurementSettings optimal_settings;
    InequalityReport report;
    long long evaluations = 0;
    bool converged = false;
    double grid_best = 0.0;
    ObservableMode mode = ObservableMode::plane;
    std::uint64_t rng_seed = 0;
};

/// Maximizes lhs + sum_i p_i |<db>_i + <dc>_i| over the four settings:
/// exhaustive coarse grid, then Nelder-Mead refinement (with restarts) from
/// the best grid points. The result is never below the best grid value;
/// global optimality is not certified. Deterministic for a fixed config,
/// independent of `jobs`.
ViolationResult maximize_violation(const Decomposition& decomp, const OptimizerConfig& config = {});

/// Single-point evaluation of scripted settings, tagged with `provenance`.
InequalityReport evaluate_witness(const Decomposition& decomp, const MeasurementSettings& settings,
                                  std::string provenance = "witness");

/// Settings from a packed angle vector: 4 plane angles (a, b, c, d) or
/// 8 spherical angles (polar, azimuth per observable).
MeasurementSettings settings_from_angles(std::span<const double> angles, ObservableMode mode);

} // namespace bellvar
