#ifndef EAMOD_NETGRAPH_HPP
#define EAMOD_NETGRAPH_HPP

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace eamod {

using ArcId = std::size_t;
using NodeId = std::size_t;

struct Location {
    int id = 0;
    std::string name;
    bool is_passthrough = false;
    double distance_offset_km = 0.0;
    double time_offset_min = 0.0;
};

/// A route between two locations. Self-loops carry intra-zone demand.
struct RoadArc {
    int origin = 0;
    int dest = 0;
    double distance_km = 0.0;
    double travel_time_min = 0.0;
    double energy_kwh = 0.0;
};

struct VehicleSpec {
    double battery_kwh = 0.0;
    double efficiency_wh_per_km = 0.0;
    double soc_min = 0.2;
    double soc_max = 0.8;
    double max_charge_kw = 0.0;
    double charge_efficiency = 1.0;

    [[nodiscard]] double usable_kwh() const { return (soc_max - soc_min) * battery_kwh; }
    [[nodiscard]] double trip_energy_kwh(double distance_km) const {
        return distance_km * efficiency_wh_per_km / 1000.0;
    }
    void validate() const;
};

struct Discretization {
    double dt_min = 15.0;
    int n_t = 96;
    double unit_kwh = 0.74;
    int n_c = 2;

    [[nodiscard]] double dt_hours() const { return dt_min / 60.0; }
    void validate() const;

    /// Derives the charge level count from the vehicle's SOC window:
    /// n_c = round(usable / unit) + 1 unless `n_c_override` is given.
    static Discretization for_vehicle(const VehicleSpec& vehicle, double dt_min, int n_t,
                                      double unit_kwh, std::optional<int> n_c_override = {});
};

/// Plug options available at every charging location, sorted by rate.
struct ChargerCatalog {
    std::vector<double> rates_kw;
    std::vector<double> cost_per_plug_horizon_usd;

    [[nodiscard]] std::size_t size() const { return rates_kw.size(); }
    [[nodiscard]] bool empty() const { return rates_kw.empty(); }
    void validate() const;
};

class RoadGraph {
public:
    RoadGraph() = default;
    /// Validates ids, arc attributes and (origin, dest) uniqueness.
    RoadGraph(std::vector<Location> locations, std::vector<RoadArc> arcs);

    /// Reads `id,name,is_passthrough,distance_offset_km,time_offset_min` and
    /// `origin,dest,distance_km,travel_time_min`. Location offsets are added to every
    /// arc touching the location (once for self-loops); energy follows from distance.
    static RoadGraph from_csv(std::istream& locations, std::istream& road,
                              const VehicleSpec& vehicle);
    static RoadGraph from_csv_files(const std::filesystem::path& locations,
                                    const std::filesystem::path& road,
                                    const VehicleSpec& vehicle);

    [[nodiscard]] const std::vector<Location>& locations() const { return locations_; }
    [[nodiscard]] const std::vector<RoadArc>& arcs() const { return arcs_; }
    [[nodiscard]] std::size_t location_count() const { return locations_.size(); }
    [[nodiscard]] std::optional<std::size_t> find_arc(int origin, int dest) const;
    /// Road arc ids leaving `loc`, ascending.
    [[nodiscard]] std::span<const std::size_t> arcs_from(int loc) const;

private:
    std::vector<Location> locations_;
    std::vector<RoadArc> arcs_;
    std::vector<std::size_t> out_start_;
    std::vector<std::size_t> out_arcs_;
};

enum class ArcKind { Travel, Idle, Charge };

const char* to_string(ArcKind kind);

struct ExpNode {
    int loc = 0;
    int t = 1;
    int c = 1;

    auto operator<=>(const ExpNode&) const = default;
};

struct ExpArc {
    ExpNode tail;
    ExpNode head;
    ArcKind kind = ArcKind::Idle;
    int road_arc = -1;   // Travel only
    int units = 0;       // Charge: levels gained; Travel: levels spent
    int rate_class = -1; // Charge only: index into the catalog
    double distance_km = 0.0;
    double grid_energy_kwh = 0.0;
    double battery_energy_kwh = 0.0;
};

/// Which side of the charger absorbs the conversion loss. With `Grid` the plug rating
/// bounds the power delivered to the battery and the grid supplies power / efficiency.
/// With `Battery` the plug rating bounds the power drawn from the grid.
enum class EfficiencySide { Grid, Battery };

struct GraphOptions {
    EfficiencySide efficiency_side = EfficiencySide::Grid;
    bool chargers_at_passthrough = false;
};

struct ArcDiscretization {
    int steps = 1;
    int units = 0;
};

/// Rounds travel time and energy up onto the grid, with a one step / one unit floor
/// for arcs of positive length. Throws InfeasibleArc if the trip needs more than
/// n_c - 1 units.
ArcDiscretization discretize_road_arc(const RoadArc& arc, const Discretization& disc);

/// Time and charge expanded multigraph. Arcs are stored in canonical order: by tail node
/// (location, time, charge), then kind (travel, idle, charge), then road arc id or units.
class ExpandedGraph {
public:
    [[nodiscard]] const RoadGraph& road() const { return road_; }
    [[nodiscard]] const Discretization& disc() const { return disc_; }
    [[nodiscard]] const VehicleSpec& vehicle() const { return vehicle_; }
    [[nodiscard]] const ChargerCatalog& catalog() const { return catalog_; }
    [[nodiscard]] const GraphOptions& options() const { return options_; }

    [[nodiscard]] const std::vector<ExpArc>& arcs() const { return arcs_; }
    [[nodiscard]] const ExpArc& arc(ArcId id) const { return arcs_[id]; }
    [[nodiscard]] std::size_t arc_count() const { return arcs_.size(); }
    [[nodiscard]] std::size_t location_count() const { return road_.location_count(); }

    [[nodiscard]] std::size_t node_count() const;
    [[nodiscard]] NodeId node_id(const ExpNode& n) const;
    [[nodiscard]] ExpNode node(NodeId id) const;

    [[nodiscard]] bool charging_allowed(int loc) const { return charging_allowed_[loc] != 0; }
    [[nodiscard]] const ArcDiscretization& road_arc_grid(std::size_t road_arc) const {
        return road_grid_[road_arc];
    }
    /// Largest number of charge units one charging arc may add.
    [[nodiscard]] int max_charge_units() const { return max_units_; }

    /// Travel arcs of one road arc departing at time t, ordered by charge level.
    [[nodiscard]] std::span<const ArcId> travel_arcs(std::size_t road_arc, int t) const;
    /// Charging arcs whose tail is at (loc, t).
    [[nodiscard]] std::span<const ArcId> charge_arcs(int loc, int t) const;

private:
    friend ExpandedGraph build_expanded_graph(RoadGraph, const Discretization&,
                                              const VehicleSpec&, const ChargerCatalog&,
                                              const GraphOptions&);

    RoadGraph road_;
    Discretization disc_;
    VehicleSpec vehicle_;
    ChargerCatalog catalog_;
    GraphOptions options_;
    std::vector<ExpArc> arcs_;
    std::vector<ArcDiscretization> road_grid_;
    std::vector<char> charging_allowed_;
    int max_units_ = 0;

    // CSR indexes keyed by road_arc * n_t + (t - 1) and loc * n_t + (t - 1).
    std::vector<std::size_t> travel_start_;
    std::vector<ArcId> travel_ids_;
    std::vector<std::size_t> charge_start_;
    std::vector<ArcId> charge_ids_;
};

ExpandedGraph build_expanded_graph(RoadGraph road, const Discretization& disc,
                                   const VehicleSpec& vehicle, const ChargerCatalog& catalog,
                                   const GraphOptions& options = {});

struct ChargePower {
    double battery_kw = 0.0;
    double grid_kw = 0.0;
};

/// Power of a charging arc on both sides of the charger. Throws NonChargeArc otherwise.
ChargePower arc_power_kw(const ExpArc& arc, const Discretization& disc,
                         const VehicleSpec& vehicle);

} // namespace eamod

#endif
