#include "fixtures.hpp"

#include <eamod/errors.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

namespace eamod::testing {

std::filesystem::path source_dir() { return EAMOD_SOURCE_DIR; }

std::filesystem::path minicity_config() {
    return source_dir() / "scenarios" / "minicity" / "scenario.json";
}

std::filesystem::path minicity_golden() { return source_dir() / "tests" / "data" / "minicity_golden.json"; }

namespace {

double uniform(std::mt19937& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int pick(std::mt19937& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool coin(std::mt19937& rng, double p) { return std::bernoulli_distribution(p)(rng); }

} // namespace

Instance random_instance(std::mt19937& rng) {
    const int n_loc = pick(rng, 2, 3);
    const bool passthrough = n_loc == 3 && coin(rng, 0.4);

    std::vector<Location> locs;
    for (int i = 0; i < n_loc; ++i) {
        Location l;
        l.id = i;
        l.name = "z" + std::to_string(i);
        l.is_passthrough = passthrough && i == n_loc - 1;
        if (l.is_passthrough) {
            l.distance_offset_km = uniform(rng, 0.5, 3.0);
            l.time_offset_min = uniform(rng, 2.0, 10.0);
        }
        locs.push_back(l);
    }

    VehicleSpec veh;
    veh.battery_kwh = uniform(rng, 12.0, 24.0);
    veh.efficiency_wh_per_km = uniform(rng, 140.0, 200.0);
    veh.soc_min = 0.2;
    veh.soc_max = 0.8;
    veh.max_charge_kw = uniform(rng, 7.0, 30.0);
    veh.charge_efficiency = uniform(rng, 0.85, 1.0);

    const double speed = uniform(rng, 20.0, 40.0);
    std::vector<RoadArc> road;
    for (int o = 0; o < n_loc; ++o) {
        for (int d = 0; d < n_loc; ++d) {
            const bool self = o == d;
            if (self && locs[o].is_passthrough) {
                continue;
            }
            if (!self && !coin(rng, 0.85)) {
                continue;
            }
            RoadArc a;
            a.origin = o;
            a.dest = d;
            a.distance_km = self ? uniform(rng, 0.5, 3.0) : uniform(rng, 2.0, 12.0);
            a.travel_time_min = a.distance_km / speed * 60.0;
            road.push_back(a);
        }
    }
    // from_csv applies offsets and energy; mirror it by round-tripping through CSV text.
    std::string loc_csv = "id,name,is_passthrough,distance_offset_km,time_offset_min\n";
    for (const auto& l : locs) {
        loc_csv += std::to_string(l.id) + "," + l.name + "," + (l.is_passthrough ? "true" : "false")
                   + "," + std::to_string(l.distance_offset_km) + ","
                   + std::to_string(l.time_offset_min) + "\n";
    }
    std::string road_csv = "origin,dest,distance_km,travel_time_min\n";
    for (const auto& a : road) {
        road_csv += std::to_string(a.origin) + "," + std::to_string(a.dest) + ","
                    + std::to_string(a.distance_km) + "," + std::to_string(a.travel_time_min) + "\n";
    }
    std::istringstream loc_in(loc_csv);
    std::istringstream road_in(road_csv);
    auto rg = RoadGraph::from_csv(loc_in, road_in, veh);

    const double dt = coin(rng, 0.5) ? 30.0 : 60.0;
    const int n_t = pick(rng, 6, 12);
    const int n_c = pick(rng, 3, 6);
    const double unit = veh.usable_kwh() / (n_c - 1);
    const auto disc = Discretization::for_vehicle(veh, dt, n_t, unit);

    static const double kRates[] = {3.7, 7.7, 11.0, 22.0, 50.0};
    ChargerCatalog cat;
    const int n_rates = pick(rng, 1, 3);
    std::vector<double> rates(std::begin(kRates), std::end(kRates));
    std::shuffle(rates.begin(), rates.end(), rng);
    rates.resize(static_cast<std::size_t>(n_rates));
    std::sort(rates.begin(), rates.end());
    cat.rates_kw = rates;
    for (double r : rates) {
        cat.cost_per_plug_horizon_usd.push_back(r * uniform(rng, 0.05, 0.3));
    }

    auto g = build_expanded_graph(std::move(rg), disc, veh, cat);

    TariffSet tariff;
    for (int t = 0; t < n_t; ++t) {
        tariff.tou.price_per_step.push_back(uniform(rng, 0.05, 0.5));
    }
    tariff.demand_charge_usd_per_kw = coin(rng, 0.2) ? 0.0 : uniform(rng, 0.01, 0.2);
    tariff.maintenance_usd_per_km = uniform(rng, 0.01, 0.1);
    tariff.fleet_usd_per_vehicle_horizon = uniform(rng, 5.0, 30.0);
    tariff.station_usd_per_plug_horizon = cat.cost_per_plug_horizon_usd;

    std::vector<Request> reqs;
    const int n_req = pick(rng, 2, 8);
    const auto& arcs = g.road().arcs();
    for (int k = 0; k < n_req * 4 && static_cast<int>(reqs.size()) < n_req; ++k) {
        const auto& ra = arcs[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(arcs.size()) - 1))];
        Request m{ra.origin, ra.dest, pick(rng, 1, n_t - 1), std::round(uniform(rng, 0.5, 5.0) * 10.0) / 10.0};
        try {
            (void)request_arcs(g, m);
        } catch (const NoFeasibleArc&) {
            continue;
        }
        reqs.push_back(m);
    }
    auto demand = make_demand_table(std::move(reqs), g.road(), g.disc());
    return {std::move(g), std::move(demand), std::move(tariff)};
}

Instance solvable_instance(std::mt19937& rng) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        auto inst = random_instance(rng);
        if (solve_instance(inst).result.stats.status == SolveStatus::Optimal) {
            return inst;
        }
    }
    throw std::runtime_error("no solvable random instance in 100 draws");
}

std::vector<std::vector<double>> random_plugs(std::mt19937& rng, const ExpandedGraph& g) {
    std::vector<std::vector<double>> plugs(g.location_count(),
                                           std::vector<double>(g.catalog().size(), 0.0));
    for (auto& row : plugs) {
        for (auto& s : row) {
            s = pick(rng, 0, 6);
        }
    }
    return plugs;
}

Solved solve_instance(const Instance& inst, const AssemblyMode& mode) {
    Solved s{assemble(inst.graph, inst.demand, inst.tariff, mode), {}};
    s.result = solve(s.lp.model);
    return s;
}

double grid_power_kw(const ExpArc& arc, const Discretization& disc) {
    return arc.grid_energy_kwh / disc.dt_hours();
}

double IndependentResiduals::max() const {
    return std::max({fleet, demand, conservation, periodicity, peak, station, bounds});
}

std::vector<double> class_flows(const ExpandedGraph& g, std::span<const double> flows, int loc,
                                int t) {
    std::vector<double> by_class(g.catalog().size(), 0.0);
    for (ArcId a = 0; a < g.arc_count(); ++a) {
        const auto& arc = g.arc(a);
        if (arc.kind == ArcKind::Charge && arc.tail.loc == loc && arc.tail.t == t) {
            by_class[static_cast<std::size_t>(arc.rate_class)] += flows[a];
        }
    }
    return by_class;
}

double greedy_unserved(std::span<const double> class_flow, std::span<const double> plugs) {
    std::vector<double> free(plugs.begin(), plugs.end());
    double unserved = 0.0;
    for (std::size_t k = 0; k < class_flow.size(); ++k) {
        double left = class_flow[k];
        for (std::size_t j = k; j < free.size() && left > 0.0; ++j) {
            const double take = std::min(left, free[j]);
            free[j] -= take;
            left -= take;
        }
        unserved += left;
    }
    return unserved;
}

IndependentResiduals independent_residuals(const ExpandedGraph& g, const DemandTable& demand,
                                           const VariableSpace& vars, std::span<const double> x) {
    IndependentResiduals r;
    const auto& disc = g.disc();
    const int n_t = disc.n_t;
    const auto f = x.first(vars.n_flows);

    for (std::size_t j = 0; j < vars.size(); ++j) {
        r.bounds = std::max(r.bounds, -x[j]);
    }

    double first_out = 0.0;
    // Net inflow per node, keyed by (loc, t, c).
    std::map<std::tuple<int, int, int>, double> in;
    std::map<std::tuple<int, int, int>, double> out;
    for (ArcId a = 0; a < g.arc_count(); ++a) {
        const auto& arc = g.arc(a);
        if (arc.tail.t == 1) {
            first_out += f[a];
        }
        in[{arc.head.loc, arc.head.t, arc.head.c}] += f[a];
        out[{arc.tail.loc, arc.tail.t, arc.tail.c}] += f[a];
    }
    r.fleet = std::abs(first_out - x[vars.fleet()]);

    const auto n_loc = static_cast<int>(g.location_count());
    for (int l = 0; l < n_loc; ++l) {
        for (int c = 1; c <= disc.n_c; ++c) {
            for (int t = 2; t < n_t; ++t) {
                r.conservation = std::max(r.conservation, std::abs(in[{l, t, c}] - out[{l, t, c}]));
            }
            r.periodicity = std::max(r.periodicity, std::abs(in[{l, n_t, c}] - out[{l, 1, c}]));
        }
    }

    for (const auto& m : demand.requests) {
        double served = 0.0;
        for (ArcId a = 0; a < g.arc_count(); ++a) {
            const auto& arc = g.arc(a);
            if (arc.kind != ArcKind::Travel || arc.tail.t != m.depart_t) {
                continue;
            }
            const auto& road = g.road().arcs()[static_cast<std::size_t>(arc.road_arc)];
            if (road.origin == m.origin && road.dest == m.dest) {
                served += f[a];
            }
        }
        r.demand = std::max(r.demand, std::abs(served - m.volume));
    }

    for (int l = 0; l < n_loc; ++l) {
        std::vector<double> plugs(vars.n_rates);
        for (std::size_t k = 0; k < vars.n_rates; ++k) {
            plugs[k] = x[vars.plug(l, k)];
        }
        for (int t = 1; t <= n_t; ++t) {
            double power = 0.0;
            for (ArcId a = 0; a < g.arc_count(); ++a) {
                const auto& arc = g.arc(a);
                if (arc.kind == ArcKind::Charge && arc.tail.loc == l && arc.tail.t == t) {
                    power += grid_power_kw(arc, disc) * f[a];
                }
            }
            r.peak = std::max(r.peak, power - x[vars.peak(l)]);
            r.station = std::max(r.station, greedy_unserved(class_flows(g, f, l, t), plugs));
        }
    }
    return r;
}

double rebalancing_violation(const ExpandedGraph& g, const DemandTable& demand,
                             std::span<const double> flows, std::span<const double> f0) {
    double worst = 0.0;
    for (ArcId a = 0; a < g.arc_count(); ++a) {
        worst = std::max({worst, -f0[a], f0[a] - flows[a]});
    }
    for (const auto& m : demand.requests) {
        double customer = 0.0;
        for (ArcId a = 0; a < g.arc_count(); ++a) {
            const auto& arc = g.arc(a);
            if (arc.kind != ArcKind::Travel || arc.tail.t != m.depart_t) {
                continue;
            }
            const auto& road = g.road().arcs()[static_cast<std::size_t>(arc.road_arc)];
            if (road.origin == m.origin && road.dest == m.dest) {
                customer += flows[a] - f0[a];
            }
        }
        worst = std::max(worst, std::abs(customer - m.volume));
    }
    return worst;
}

double status_violation(const std::vector<StatusCounts>& series, double fleet) {
    double worst = 0.0;
    for (const auto& s : series) {
        worst = std::max(worst, std::abs(s.total() - fleet));
    }
    return worst;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1.0); }

} // namespace eamod::testing
