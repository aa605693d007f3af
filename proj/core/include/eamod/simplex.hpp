#ifndef EAMOD_SIMPLEX_HPP
#define EAMOD_SIMPLEX_HPP

#include "eamod/lp_model.hpp"

#include <span>
#include <string>
#include <vector>

namespace eamod {

struct SolverConfig {
    double feasibility_tol = 1e-7;
    double optimality_tol = 1e-7;
    long max_iters = 5'000'000;
    bool scaling = true;
    /// Basis refactorization period in iterations.
    int refactor_interval = 50;

    /// Throws InvalidInput unless both tolerances lie in (0, 1e-3].
    void validate() const;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterLimit };

const char* to_string(SolveStatus status);

struct SolveStats {
    SolveStatus status = SolveStatus::IterLimit;
    long iterations = 0;
    long phase1_iterations = 0;
    long bland_iterations = 0;
    long refactorizations = 0;
    double wall_time_s = 0.0;
    double objective = 0.0;
    /// Lagrangian lower bound from the final duals; tiny dual infeasibilities are dropped.
    double dual_bound = 0.0;
    double max_dual_infeasibility = 0.0;
    /// Row family carrying the largest residual infeasibility (Infeasible only).
    std::string infeasible_family;
    /// Entering column along which the objective decreases without bound (Unbounded only).
    std::string unbounded_ray;
};

struct SolveResult {
    std::vector<double> x;
    /// Row duals in the model's own units (sign convention: d = c - A'y).
    std::vector<double> duals;
    SolveStats stats;
};

/// Bounded revised primal simplex: two phases with artificials, Devex pricing, Harris
/// ratio test, and Bland's rule after a stall. Deterministic for a fixed model and config.
SolveResult solve(const LpModel& model, const SolverConfig& cfg = {});

struct PeakGap {
    int loc = -1;
    double peak = 0.0;
    double max_load = 0.0;
};

struct VerifyReport {
    ResidualReport residuals;
    double tol = 1e-6;
    /// Whether tightness was checked (some peak variable has a positive price).
    bool tightness_checked = false;
    /// Locations whose peak variable exceeds their largest per-step charging power.
    std::vector<PeakGap> slack_peaks;

    [[nodiscard]] bool feasible() const { return residuals.max() <= tol; }
    [[nodiscard]] bool peaks_tight() const { return slack_peaks.empty(); }
    [[nodiscard]] bool ok() const { return feasible() && peaks_tight(); }
};

/// Residuals per constraint family plus, for priced peak variables at locations that
/// charge, the gap between the peak variable and the largest per-step charging power.
VerifyReport verify(const LpModel& model, std::span<const double> x, double tol = 1e-6);

} // namespace eamod

#endif
