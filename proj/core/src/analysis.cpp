#include "eamod/analysis.hpp"

#include "eamod/errors.hpp"

#include <algorithm>
#include <functional>

namespace eamod {

FleetSolution decode_solution(const ExpandedGraph& g, const DemandTable& demand,
                              const VariableSpace& vars, std::span<const double> x,
                              double objective) {
    if (x.size() < vars.size()) {
        throw InvalidInput("solution vector is shorter than the variable space");
    }
    FleetSolution sol;
    sol.flows.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(vars.n_flows));
    sol.plugs.assign(vars.n_locations, std::vector<double>(vars.n_rates, 0.0));
    sol.peak_kw.assign(vars.n_locations, 0.0);
    for (std::size_t loc = 0; loc < vars.n_locations; ++loc) {
        for (std::size_t r = 0; r < vars.n_rates; ++r) {
            sol.plugs[loc][r] = x[vars.plug(static_cast<int>(loc), r)];
        }
        sol.peak_kw[loc] = x[vars.peak(static_cast<int>(loc))];
    }
    sol.fleet = x[vars.fleet()];
    sol.objective = objective;
    sol.rebalance = recover_rebalancing(g, demand, sol.flows);
    return sol;
}

std::vector<double> recover_rebalancing(const ExpandedGraph& g, const DemandTable& demand,
                                        std::span<const double> flows) {
    std::vector<double> f0(g.arc_count(), 0.0);
    std::vector<char> matched(g.arc_count(), 0);
    for (const auto& m : demand.requests) {
        const auto road_arc = g.road().find_arc(m.origin, m.dest);
        if (!road_arc) {
            continue;
        }
        const auto ids = g.travel_arcs(*road_arc, m.depart_t);
        double total = 0.0;
        for (auto a : ids) {
            total += flows[a];
        }
        const double excess = std::max(total - m.volume, 0.0);
        for (auto a : ids) {
            matched[a] = 1;
            f0[a] = total > 0.0 ? excess * flows[a] / total : 0.0;
        }
    }
    for (ArcId a = 0; a < g.arc_count(); ++a) {
        if (g.arc(a).kind == ArcKind::Travel && !matched[a]) {
            f0[a] = flows[a];
        }
    }
    return f0;
}

CostBreakdown cost_breakdown(const FleetSolution& sol, const TariffSet& tariff,
                             const ExpandedGraph& g) {
    CostBreakdown c;
    for (ArcId a = 0; a < g.arc_count(); ++a) {
        const auto& arc = g.arc(a);
        const double f = sol.flows[a];
        if (arc.kind == ArcKind::Charge) {
            c.energy_usd += f * arc.grid_energy_kwh * tariff.tou.price(arc.tail.t);
        } else if (arc.kind == ArcKind::Travel) {
            c.maintenance_usd += f * arc.distance_km * tariff.maintenance_usd_per_km;
            c.rebalancing_usd += sol.rebalance[a] * arc.distance_km * tariff.maintenance_usd_per_km;
        }
    }
    for (double p : sol.peak_kw) {
        c.demand_usd += p * tariff.demand_charge_usd_per_kw;
    }
    c.fleet_usd = sol.fleet * tariff.fleet_usd_per_vehicle_horizon;
    for (const auto& row : sol.plugs) {
        for (std::size_t r = 0; r < row.size(); ++r) {
            c.station_usd += row[r] * tariff.station_usd_per_plug_horizon[r];
        }
    }
    c.total_usd = c.energy_usd + c.demand_usd + c.maintenance_usd + c.fleet_usd + c.station_usd;
    return c;
}

Kpis compute_kpis(const FleetSolution& sol, const ExpandedGraph& g) {
    Kpis k;
    for (ArcId a = 0; a < g.arc_count(); ++a) {
        const auto& arc = g.arc(a);
        if (arc.kind == ArcKind::Charge) {
            k.charging_energy_kwh += sol.flows[a] * arc.grid_energy_kwh;
        } else if (arc.kind == ArcKind::Travel) {
            k.travel_distance_km += sol.flows[a] * arc.distance_km;
            k.rebalancing_distance_km += sol.rebalance[a] * arc.distance_km;
        }
    }
    for (const auto& step : charging_load_series(g, sol.flows)) {
        double total = 0.0;
        for (double v : step) {
            total += v;
        }
        k.peak_load_kw = std::max(k.peak_load_kw, total);
    }
    for (double p : sol.peak_kw) {
        k.sum_peak_kw += p;
    }
    k.installed_capacity_kw = make_siting_plan(sol.plugs, g.catalog().rates_kw).total_capacity_kw;
    return k;
}

LoadSeries charging_load_series(const ExpandedGraph& g, std::span<const double> flows) {
    LoadSeries series(static_cast<std::size_t>(g.disc().n_t),
                      std::vector<double>(g.location_count(), 0.0));
    for (ArcId a = 0; a < g.arc_count(); ++a) {
        const auto& arc = g.arc(a);
        if (arc.kind != ArcKind::Charge) {
            continue;
        }
        series[static_cast<std::size_t>(arc.tail.t - 1)][static_cast<std::size_t>(arc.tail.loc)] +=
            flows[a] * arc_power_kw(arc, g.disc(), g.vehicle()).grid_kw;
    }
    return series;
}

std::vector<StatusCounts> vehicle_status_series(const ExpandedGraph& g,
                                                std::span<const double> flows,
                                                std::span<const double> rebalance) {
    const int n_t = g.disc().n_t;
    std::vector<StatusCounts> series(static_cast<std::size_t>(n_t));
    for (ArcId a = 0; a < g.arc_count(); ++a) {
        const auto& arc = g.arc(a);
        const double f = flows[a];
        if (f == 0.0) {
            continue;
        }
        for (int t = arc.tail.t; t < arc.head.t; ++t) {
            auto& s = series[static_cast<std::size_t>(t - 1)];
            switch (arc.kind) {
            case ArcKind::Idle:
                s.idle += f;
                break;
            case ArcKind::Charge:
                s.charging += f;
                break;
            case ArcKind::Travel:
                s.passenger += f - rebalance[a];
                s.rebalancing += rebalance[a];
                break;
            }
        }
        if (arc.head.t == n_t) {
            series.back().idle += f;
        }
    }
    return series;
}

SitingPlan make_siting_plan(std::vector<std::vector<double>> plugs, std::vector<double> rates_kw) {
    SitingPlan plan;
    plan.rates_kw = std::move(rates_kw);
    plan.plugs = std::move(plugs);
    plan.capacity_kw.assign(plan.plugs.size(), 0.0);
    for (std::size_t loc = 0; loc < plan.plugs.size(); ++loc) {
        if (plan.plugs[loc].size() != plan.rates_kw.size()) {
            throw InvalidInput("plug table needs one entry per charger rate");
        }
        for (std::size_t r = 0; r < plan.rates_kw.size(); ++r) {
            if (!(plan.plugs[loc][r] >= 0.0)) {
                throw InvalidInput("plug counts must be nonnegative");
            }
            plan.capacity_kw[loc] += plan.plugs[loc][r] * plan.rates_kw[r];
        }
        plan.total_capacity_kw += plan.capacity_kw[loc];
    }
    return plan;
}

SitingPlan scale_baseline(const std::vector<std::vector<double>>& present_plugs,
                          const std::vector<double>& rates_kw, double target_capacity_kw) {
    const auto present = make_siting_plan(present_plugs, rates_kw);
    if (!(present.total_capacity_kw > 0.0)) {
        throw InvalidInput("present-day layout has no installed capacity to scale");
    }
    if (!(target_capacity_kw >= 0.0)) {
        throw InvalidInput("target capacity must be nonnegative");
    }
    const double factor = target_capacity_kw / present.total_capacity_kw;
    auto scaled = present_plugs;
    for (auto& row : scaled) {
        for (auto& s : row) {
            s *= factor;
        }
    }
    auto plan = make_siting_plan(std::move(scaled), rates_kw);
    plan.scale_factor = factor;
    return plan;
}

std::vector<double> capacity_cdf(const SitingPlan& plan) {
    if (!(plan.total_capacity_kw > 0.0)) {
        throw InvalidInput("capacity distribution of an empty siting plan is undefined");
    }
    auto caps = plan.capacity_kw;
    std::sort(caps.begin(), caps.end(), std::greater<>());
    std::vector<double> cdf;
    cdf.reserve(caps.size());
    double running = 0.0;
    for (double c : caps) {
        running += c;
        cdf.push_back(running / plan.total_capacity_kw);
    }
    if (!cdf.empty()) {
        cdf.back() = 1.0;
    }
    return cdf;
}

} // namespace eamod
