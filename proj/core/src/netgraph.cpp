#include "eamod/netgraph.hpp"

#include "eamod/csv.hpp"
#include "eamod/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <utility>

namespace eamod {

namespace {

// Absorbs representation error in quotients such as 15.0 / 15.0 or 7.7 * 0.25 / 0.77.
constexpr double kRoundingSlack = 1e-9;

int ceil_steps(double value) {
    return static_cast<int>(std::ceil(value - kRoundingSlack));
}

} // namespace

void VehicleSpec::validate() const {
    if (!(battery_kwh > 0.0)) {
        throw InvalidInput("vehicle battery_kwh must be positive");
    }
    if (!(efficiency_wh_per_km > 0.0)) {
        throw InvalidInput("vehicle efficiency_wh_per_km must be positive");
    }
    if (!(soc_min >= 0.0 && soc_min < 1.0 && soc_max > soc_min && soc_max <= 1.0)) {
        throw InvalidInput("vehicle SOC window must satisfy 0 <= soc_min < soc_max <= 1");
    }
    if (!(max_charge_kw > 0.0)) {
        throw InvalidInput("vehicle max_charge_kw must be positive");
    }
    if (!(charge_efficiency > 0.0 && charge_efficiency <= 1.0)) {
        throw InvalidInput("vehicle charge_efficiency must be in (0, 1]");
    }
}

void Discretization::validate() const {
    if (!(dt_min > 0.0)) {
        throw InvalidInput("dt_min must be positive");
    }
    if (n_t < 2) {
        throw InvalidInput("n_t must be at least 2");
    }
    if (!(unit_kwh > 0.0)) {
        throw InvalidInput("unit_kwh must be positive");
    }
    if (n_c < 2) {
        throw InvalidInput("n_c must be at least 2");
    }
}

Discretization Discretization::for_vehicle(const VehicleSpec& vehicle, double dt_min, int n_t,
                                           double unit_kwh, std::optional<int> n_c_override) {
    vehicle.validate();
    Discretization d{dt_min, n_t, unit_kwh, 2};
    if (n_c_override) {
        d.n_c = *n_c_override;
    } else {
        if (!(unit_kwh > 0.0)) {
            throw InvalidInput("unit_kwh must be positive");
        }
        d.n_c = static_cast<int>(std::lround(vehicle.usable_kwh() / unit_kwh)) + 1;
    }
    d.validate();
    return d;
}

void ChargerCatalog::validate() const {
    if (rates_kw.size() != cost_per_plug_horizon_usd.size()) {
        throw InvalidInput("charger catalog needs one plug price per rate");
    }
    for (std::size_t i = 0; i < rates_kw.size(); ++i) {
        if (!(rates_kw[i] > 0.0)) {
            throw InvalidInput("charger rates must be positive");
        }
        if (i > 0 && !(rates_kw[i] > rates_kw[i - 1])) {
            throw InvalidInput("charger rates must be strictly increasing");
        }
        if (!(cost_per_plug_horizon_usd[i] >= 0.0)) {
            throw InvalidInput("charger plug prices must be nonnegative");
        }
    }
}

RoadGraph::RoadGraph(std::vector<Location> locations, std::vector<RoadArc> arcs)
    : locations_(std::move(locations)), arcs_(std::move(arcs)) {
    const auto n = static_cast<int>(locations_.size());
    for (int i = 0; i < n; ++i) {
        if (locations_[i].id != i) {
            throw InvalidInput("location ids must be dense 0..n-1 in order; found id "
                               + std::to_string(locations_[i].id) + " at position "
                               + std::to_string(i));
        }
        if (locations_[i].distance_offset_km < 0.0 || locations_[i].time_offset_min < 0.0) {
            throw InvalidInput("location offsets must be nonnegative");
        }
    }
    std::map<std::pair<int, int>, std::size_t> seen;
    for (std::size_t a = 0; a < arcs_.size(); ++a) {
        const auto& arc = arcs_[a];
        if (arc.origin < 0 || arc.origin >= n) {
            throw UnknownLocation(arc.origin);
        }
        if (arc.dest < 0 || arc.dest >= n) {
            throw UnknownLocation(arc.dest);
        }
        if (!(arc.travel_time_min > 0.0)) {
            throw InvalidInput("road arc " + std::to_string(arc.origin) + "->"
                               + std::to_string(arc.dest) + " needs positive travel time");
        }
        if (arc.distance_km < 0.0 || arc.energy_kwh < 0.0) {
            throw InvalidInput("road arc " + std::to_string(arc.origin) + "->"
                               + std::to_string(arc.dest)
                               + " has negative distance or energy");
        }
        if (!seen.emplace(std::pair{arc.origin, arc.dest}, a).second) {
            throw InvalidInput("duplicate road arc " + std::to_string(arc.origin) + "->"
                               + std::to_string(arc.dest));
        }
    }

    out_start_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& arc : arcs_) {
        ++out_start_[static_cast<std::size_t>(arc.origin) + 1];
    }
    for (std::size_t i = 1; i < out_start_.size(); ++i) {
        out_start_[i] += out_start_[i - 1];
    }
    out_arcs_.resize(arcs_.size());
    auto fill = out_start_;
    for (std::size_t a = 0; a < arcs_.size(); ++a) {
        out_arcs_[fill[static_cast<std::size_t>(arcs_[a].origin)]++] = a;
    }
}

RoadGraph RoadGraph::from_csv(std::istream& locations_in, std::istream& road_in,
                              const VehicleSpec& vehicle) {
    const auto loc_table = csv::Table::read(locations_in, "locations");
    loc_table.require({"id", "name", "is_passthrough", "distance_offset_km", "time_offset_min"});
    std::vector<Location> locations(loc_table.rows());
    std::vector<char> filled(loc_table.rows(), 0);
    for (std::size_t r = 0; r < loc_table.rows(); ++r) {
        const auto id = loc_table.integer(r, "id");
        if (id < 0 || static_cast<std::size_t>(id) >= loc_table.rows() || filled[id]) {
            throw InvalidInput("locations: ids must be a permutation of 0..n-1 (bad id "
                               + std::to_string(id) + ")");
        }
        filled[id] = 1;
        auto& loc = locations[id];
        loc.id = static_cast<int>(id);
        loc.name = loc_table.cell(r, "name");
        loc.is_passthrough = loc_table.boolean(r, "is_passthrough");
        loc.distance_offset_km = loc_table.number(r, "distance_offset_km");
        loc.time_offset_min = loc_table.number(r, "time_offset_min");
    }

    const auto road_table = csv::Table::read(road_in, "road");
    road_table.require({"origin", "dest", "distance_km", "travel_time_min"});
    std::vector<RoadArc> arcs;
    arcs.reserve(road_table.rows());
    const auto n = static_cast<long>(locations.size());
    for (std::size_t r = 0; r < road_table.rows(); ++r) {
        const auto o = road_table.integer(r, "origin");
        const auto d = road_table.integer(r, "dest");
        if (o < 0 || o >= n) {
            throw UnknownLocation(o);
        }
        if (d < 0 || d >= n) {
            throw UnknownLocation(d);
        }
        RoadArc arc;
        arc.origin = static_cast<int>(o);
        arc.dest = static_cast<int>(d);
        arc.distance_km = road_table.number(r, "distance_km") + locations[o].distance_offset_km;
        arc.travel_time_min =
            road_table.number(r, "travel_time_min") + locations[o].time_offset_min;
        if (d != o) {
            arc.distance_km += locations[d].distance_offset_km;
            arc.travel_time_min += locations[d].time_offset_min;
        }
        arc.energy_kwh = vehicle.trip_energy_kwh(arc.distance_km);
        arcs.push_back(arc);
    }
    return RoadGraph(std::move(locations), std::move(arcs));
}

RoadGraph RoadGraph::from_csv_files(const std::filesystem::path& locations,
                                    const std::filesystem::path& road,
                                    const VehicleSpec& vehicle) {
    std::ifstream loc_in(locations);
    if (!loc_in) {
        throw IoError("cannot open " + locations.string());
    }
    std::ifstream road_in(road);
    if (!road_in) {
        throw IoError("cannot open " + road.string());
    }
    return from_csv(loc_in, road_in, vehicle);
}

std::optional<std::size_t> RoadGraph::find_arc(int origin, int dest) const {
    if (origin < 0 || static_cast<std::size_t>(origin) >= locations_.size()) {
        return std::nullopt;
    }
    for (auto a : arcs_from(origin)) {
        if (arcs_[a].dest == dest) {
            return a;
        }
    }
    return std::nullopt;
}

std::span<const std::size_t> RoadGraph::arcs_from(int loc) const {
    const auto l = static_cast<std::size_t>(loc);
    return {out_arcs_.data() + out_start_[l], out_start_[l + 1] - out_start_[l]};
}

const char* to_string(ArcKind kind) {
    switch (kind) {
    case ArcKind::Travel:
        return "travel";
    case ArcKind::Idle:
        return "idle";
    case ArcKind::Charge:
        return "charge";
    }
    return "?";
}

ArcDiscretization discretize_road_arc(const RoadArc& arc, const Discretization& disc) {
    ArcDiscretization g;
    g.steps = std::max(1, ceil_steps(arc.travel_time_min / disc.dt_min));
    g.units = std::max(0, ceil_steps(arc.energy_kwh / disc.unit_kwh));
    if (arc.distance_km > 0.0) {
        g.units = std::max(1, g.units);
    }
    if (g.units > disc.n_c - 1) {
        throw InfeasibleArc(arc.origin, arc.dest, g.units, disc.n_c - 1);
    }
    return g;
}

std::size_t ExpandedGraph::node_count() const {
    return road_.location_count() * static_cast<std::size_t>(disc_.n_t)
           * static_cast<std::size_t>(disc_.n_c);
}

NodeId ExpandedGraph::node_id(const ExpNode& n) const {
    return (static_cast<std::size_t>(n.loc) * static_cast<std::size_t>(disc_.n_t)
            + static_cast<std::size_t>(n.t - 1))
               * static_cast<std::size_t>(disc_.n_c)
           + static_cast<std::size_t>(n.c - 1);
}

ExpNode ExpandedGraph::node(NodeId id) const {
    const auto nc = static_cast<std::size_t>(disc_.n_c);
    const auto nt = static_cast<std::size_t>(disc_.n_t);
    ExpNode n;
    n.c = static_cast<int>(id % nc) + 1;
    id /= nc;
    n.t = static_cast<int>(id % nt) + 1;
    n.loc = static_cast<int>(id / nt);
    return n;
}

std::span<const ArcId> ExpandedGraph::travel_arcs(std::size_t road_arc, int t) const {
    if (t < 1 || t > disc_.n_t || road_arc >= road_.arcs().size()) {
        return {};
    }
    const auto key = road_arc * static_cast<std::size_t>(disc_.n_t) + static_cast<std::size_t>(t - 1);
    return {travel_ids_.data() + travel_start_[key], travel_start_[key + 1] - travel_start_[key]};
}

std::span<const ArcId> ExpandedGraph::charge_arcs(int loc, int t) const {
    if (t < 1 || t > disc_.n_t || loc < 0 || static_cast<std::size_t>(loc) >= location_count()) {
        return {};
    }
    const auto key = static_cast<std::size_t>(loc) * static_cast<std::size_t>(disc_.n_t)
                     + static_cast<std::size_t>(t - 1);
    return {charge_ids_.data() + charge_start_[key], charge_start_[key + 1] - charge_start_[key]};
}

namespace {

// Buckets arc ids by key into a CSR pair; ids stay in ascending order within a bucket.
void bucket(const std::vector<std::pair<std::size_t, ArcId>>& keyed, std::size_t key_count,
            std::vector<std::size_t>& start, std::vector<ArcId>& ids) {
    start.assign(key_count + 1, 0);
    for (const auto& [key, id] : keyed) {
        ++start[key + 1];
    }
    for (std::size_t i = 1; i < start.size(); ++i) {
        start[i] += start[i - 1];
    }
    ids.resize(keyed.size());
    auto fill = start;
    for (const auto& [key, id] : keyed) {
        ids[fill[key]++] = id;
    }
}

} // namespace

ExpandedGraph build_expanded_graph(RoadGraph road, const Discretization& disc,
                                   const VehicleSpec& vehicle, const ChargerCatalog& catalog,
                                   const GraphOptions& options) {
    disc.validate();
    vehicle.validate();
    catalog.validate();

    ExpandedGraph g;
    g.road_ = std::move(road);
    g.disc_ = disc;
    g.vehicle_ = vehicle;
    g.catalog_ = catalog;
    g.options_ = options;

    const auto& road_arcs = g.road_.arcs();
    g.road_grid_.reserve(road_arcs.size());
    for (const auto& arc : road_arcs) {
        g.road_grid_.push_back(discretize_road_arc(arc, disc));
    }

    const auto n_loc = static_cast<int>(g.road_.location_count());
    g.charging_allowed_.assign(static_cast<std::size_t>(n_loc), 0);
    for (int i = 0; i < n_loc; ++i) {
        const bool passthrough = g.road_.locations()[i].is_passthrough;
        g.charging_allowed_[i] =
            !catalog.empty() && (!passthrough || options.chargers_at_passthrough) ? 1 : 0;
    }

    // Battery-side power limits; the vehicle limit always applies to the battery.
    const double eta = vehicle.charge_efficiency;
    const bool grid_side = options.efficiency_side == EfficiencySide::Grid;
    std::vector<int> unit_class; // rate class per units, index 1..max_units
    if (!catalog.empty()) {
        const double plug_cap = grid_side ? catalog.rates_kw.back() : catalog.rates_kw.back() * eta;
        const double cap_kw = std::min(plug_cap, vehicle.max_charge_kw);
        g.max_units_ = static_cast<int>(
            std::floor(cap_kw * disc.dt_hours() / disc.unit_kwh + kRoundingSlack));
        g.max_units_ = std::min(g.max_units_, disc.n_c - 1);
        unit_class.assign(static_cast<std::size_t>(std::max(g.max_units_, 0)) + 1, -1);
        for (int k = 1; k <= g.max_units_; ++k) {
            const double battery_kw = k * disc.unit_kwh / disc.dt_hours();
            const double plug_kw = grid_side ? battery_kw : battery_kw / eta;
            for (std::size_t r = 0; r < catalog.size(); ++r) {
                if (plug_kw <= catalog.rates_kw[r] * (1.0 + kRoundingSlack)) {
                    unit_class[k] = static_cast<int>(r);
                    break;
                }
            }
        }
    }

    const int n_t = disc.n_t;
    const int n_c = disc.n_c;
    std::vector<std::pair<std::size_t, ArcId>> travel_keyed;
    std::vector<std::pair<std::size_t, ArcId>> charge_keyed;

    for (int loc = 0; loc < n_loc; ++loc) {
        const auto out = g.road_.arcs_from(loc);
        for (int t = 1; t <= n_t; ++t) {
            for (int c = 1; c <= n_c; ++c) {
                const ExpNode tail{loc, t, c};
                for (auto ra : out) {
                    const auto& grid = g.road_grid_[ra];
                    const auto& rarc = road_arcs[ra];
                    if (t + grid.steps > n_t || c - grid.units < 1) {
                        continue;
                    }
                    ExpArc a;
                    a.tail = tail;
                    a.head = {rarc.dest, t + grid.steps, c - grid.units};
                    a.kind = ArcKind::Travel;
                    a.road_arc = static_cast<int>(ra);
                    a.units = grid.units;
                    a.distance_km = rarc.distance_km;
                    travel_keyed.emplace_back(ra * static_cast<std::size_t>(n_t)
                                                  + static_cast<std::size_t>(t - 1),
                                              g.arcs_.size());
                    g.arcs_.push_back(a);
                }
                if (t < n_t) {
                    ExpArc a;
                    a.tail = tail;
                    a.head = {loc, t + 1, c};
                    a.kind = ArcKind::Idle;
                    g.arcs_.push_back(a);
                }
                if (t < n_t && g.charging_allowed_[loc]) {
                    for (int k = 1; k <= g.max_units_ && c + k <= n_c; ++k) {
                        ExpArc a;
                        a.tail = tail;
                        a.head = {loc, t + 1, c + k};
                        a.kind = ArcKind::Charge;
                        a.units = k;
                        a.rate_class = unit_class[k];
                        a.battery_energy_kwh = k * disc.unit_kwh;
                        a.grid_energy_kwh = a.battery_energy_kwh / eta;
                        charge_keyed.emplace_back(static_cast<std::size_t>(loc)
                                                          * static_cast<std::size_t>(n_t)
                                                      + static_cast<std::size_t>(t - 1),
                                                  g.arcs_.size());
                        g.arcs_.push_back(a);
                    }
                }
            }
        }
    }

    if (g.arcs_.empty()) {
        throw EmptyGraph();
    }
    bucket(travel_keyed, road_arcs.size() * static_cast<std::size_t>(n_t), g.travel_start_,
           g.travel_ids_);
    bucket(charge_keyed, static_cast<std::size_t>(n_loc) * static_cast<std::size_t>(n_t),
           g.charge_start_, g.charge_ids_);
    return g;
}

ChargePower arc_power_kw(const ExpArc& arc, const Discretization& disc,
                         const VehicleSpec& vehicle) {
    if (arc.kind != ArcKind::Charge) {
        throw NonChargeArc();
    }
    ChargePower p;
    p.battery_kw = arc.units * disc.unit_kwh / disc.dt_hours();
    p.grid_kw = p.battery_kw / vehicle.charge_efficiency;
    return p;
}

} // namespace eamod
