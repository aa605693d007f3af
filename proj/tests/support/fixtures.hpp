#ifndef EAMOD_TESTS_FIXTURES_HPP
#define EAMOD_TESTS_FIXTURES_HPP

#include <eamod/analysis.hpp>
#include <eamod/demand.hpp>
#include <eamod/lp_model.hpp>
#include <eamod/netgraph.hpp>
#include <eamod/simplex.hpp>
#include <eamod/tariff.hpp>

#include <filesystem>
#include <random>
#include <span>
#include <vector>

namespace eamod::testing {

std::filesystem::path source_dir();
std::filesystem::path minicity_config();
std::filesystem::path minicity_golden();

struct Instance {
    ExpandedGraph graph;
    DemandTable demand;
    TariffSet tariff;
};

/// Small random city: 2-3 zones (sometimes one pass-through), sparse road arcs with
/// self-loops, 1-3 charger rates, random step prices and a handful of requests that
/// the expanded graph can serve.
Instance random_instance(std::mt19937& rng);

/// Draws random instances until one solves to optimality in joint mode. Some draws are
/// genuinely infeasible (one-way roads leave no way back for periodicity).
Instance solvable_instance(std::mt19937& rng);

/// Random plug table with 0-6 plugs per (location, rate).
std::vector<std::vector<double>> random_plugs(std::mt19937& rng, const ExpandedGraph& g);

struct Solved {
    AssembledLp lp;
    SolveResult result;
};

Solved solve_instance(const Instance& inst, const AssemblyMode& mode = AssemblyMode::joint());

/// Grid power of a charging arc, straight from its energy and the step length.
double grid_power_kw(const ExpArc& arc, const Discretization& disc);

/// Constraint violations recomputed from the graph alone, without the assembled rows.
struct IndependentResiduals {
    double fleet = 0.0;
    double demand = 0.0;
    double conservation = 0.0;
    double periodicity = 0.0;
    double peak = 0.0;
    double station = 0.0;
    double bounds = 0.0;

    [[nodiscard]] double max() const;
};

IndependentResiduals independent_residuals(const ExpandedGraph& g, const DemandTable& demand,
                                           const VariableSpace& vars, std::span<const double> x);

/// Brute-force plug check for one (location, step): serve each rate class in turn from
/// its own plugs, spilling whatever is left onto unused plugs of faster classes.
/// Returns the charging flow that found no plug.
double greedy_unserved(std::span<const double> class_flow, std::span<const double> plugs);

/// Charging flow per rate class at (loc, t).
std::vector<double> class_flows(const ExpandedGraph& g, std::span<const double> flows, int loc,
                                int t);

/// Checks the recovered rebalancing flows; returns the worst violation of
/// 0 <= f0 <= f and of the per-request customer flow identity.
double rebalancing_violation(const ExpandedGraph& g, const DemandTable& demand,
                             std::span<const double> flows, std::span<const double> f0);

/// Worst |sum of status counts - F| over all steps.
double status_violation(const std::vector<StatusCounts>& series, double fleet);

/// |a - b| / max(|b|, 1): relative, with an absolute floor for values near zero.
double rel_diff(double a, double b);

} // namespace eamod::testing

#endif
