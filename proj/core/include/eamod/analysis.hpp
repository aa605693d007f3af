#ifndef EAMOD_ANALYSIS_HPP
#define EAMOD_ANALYSIS_HPP

#include "eamod/demand.hpp"
#include "eamod/lp_model.hpp"
#include "eamod/netgraph.hpp"
#include "eamod/tariff.hpp"

#include <span>
#include <vector>

namespace eamod {

/// Optimal flows and sizing decoded from an LP solution.
struct FleetSolution {
    std::vector<double> flows;
    /// Empty-vehicle share of each travel arc's flow; zero on idle and charge arcs.
    std::vector<double> rebalance;
    std::vector<std::vector<double>> plugs; // [location][rate]
    std::vector<double> peak_kw;            // per location
    double fleet = 0.0;
    double objective = 0.0;
};

FleetSolution decode_solution(const ExpandedGraph& g, const DemandTable& demand,
                              const VariableSpace& vars, std::span<const double> x,
                              double objective);

/// Splits travel flow into customer and rebalancing parts. Excess flow over a request's
/// volume is spread over its arcs in proportion to their flow; travel arcs serving no
/// request are pure rebalancing. A request whose arcs carry no flow gets zero.
std::vector<double> recover_rebalancing(const ExpandedGraph& g, const DemandTable& demand,
                                        std::span<const double> flows);

struct CostBreakdown {
    double energy_usd = 0.0;
    double demand_usd = 0.0;
    /// All non-idle travel, matching the objective's distance term.
    double maintenance_usd = 0.0;
    /// Rebalancing-only share of the maintenance cost; not part of the total.
    double rebalancing_usd = 0.0;
    double fleet_usd = 0.0;
    double station_usd = 0.0;
    double total_usd = 0.0;
};

/// Recomputes every objective term from the solution, independently of the solver.
CostBreakdown cost_breakdown(const FleetSolution& sol, const TariffSet& tariff,
                             const ExpandedGraph& g);

struct Kpis {
    double charging_energy_kwh = 0.0; // drawn from the grid
    double peak_load_kw = 0.0;        // largest fleet-wide per-step charging load
    double sum_peak_kw = 0.0;         // sum of location peaks
    double travel_distance_km = 0.0;
    double rebalancing_distance_km = 0.0;
    double installed_capacity_kw = 0.0;
};

Kpis compute_kpis(const FleetSolution& sol, const ExpandedGraph& g);

/// Grid-side charging power, indexed [t - 1][location].
using LoadSeries = std::vector<std::vector<double>>;

LoadSeries charging_load_series(const ExpandedGraph& g, std::span<const double> flows);

struct StatusCounts {
    double idle = 0.0;
    double charging = 0.0;
    double passenger = 0.0;
    double rebalancing = 0.0;

    [[nodiscard]] double total() const { return idle + charging + passenger + rebalancing; }
};

/// Vehicles per status at each step. An arc occupies every step from its tail time up to
/// (excluding) its head time; at the final step vehicles are parked in their terminal
/// state and count as idle.
std::vector<StatusCounts> vehicle_status_series(const ExpandedGraph& g,
                                                std::span<const double> flows,
                                                std::span<const double> rebalance);

struct SitingPlan {
    std::vector<double> rates_kw;
    std::vector<std::vector<double>> plugs; // [location][rate]
    std::vector<double> capacity_kw;        // per location
    double total_capacity_kw = 0.0;
    double scale_factor = 1.0;
};

SitingPlan make_siting_plan(std::vector<std::vector<double>> plugs, std::vector<double> rates_kw);

/// Multiplies every plug count by one factor so total capacity reaches `target_capacity_kw`.
/// Throws InvalidInput when the present layout has no capacity.
SitingPlan scale_baseline(const std::vector<std::vector<double>>& present_plugs,
                          const std::vector<double>& rates_kw, double target_capacity_kw);

/// Cumulative capacity share with locations sorted by descending capacity.
std::vector<double> capacity_cdf(const SitingPlan& plan);

} // namespace eamod

#endif
