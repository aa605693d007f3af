#ifndef EAMOD_CLI_CONFIG_HPP
#define EAMOD_CLI_CONFIG_HPP

#include <eamod/analysis.hpp>
#include <eamod/demand.hpp>
#include <eamod/lp_model.hpp>
#include <eamod/netgraph.hpp>
#include <eamod/simplex.hpp>
#include <eamod/tariff.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace eamod::cli {

enum class DemandFormat { Hourly, Step };

/// One scenario file. Relative paths are resolved against the file's directory.
struct ScenarioConfig {
    std::string name = "scenario";
    std::filesystem::path locations_csv;
    std::filesystem::path road_csv;
    std::filesystem::path demand_csv; // may be empty: the scenario then has no requests
    DemandFormat demand_format = DemandFormat::Hourly;

    VehicleSpec vehicle;
    double dt_min = 15.0;
    int n_t = 96;
    double unit_kwh = 0.74;
    std::optional<int> n_c;

    ChargerCatalog catalog;
    GraphOptions graph;

    std::vector<TouWindow> tou_windows;
    double tou_default_price = 0.0;
    double demand_charge_usd_per_kw = 0.0;
    double maintenance_usd_per_km = 0.0;
    double fleet_usd_per_vehicle = 0.0;

    AssemblyMode::Kind mode = AssemblyMode::Kind::Joint;
    std::filesystem::path baseline_plugs_csv;
    std::optional<double> baseline_target_kw;

    SolverConfig solver;
    std::filesystem::path output_dir = "out";

    [[nodiscard]] double horizon_days() const { return n_t * dt_min / 1440.0; }
    [[nodiscard]] Discretization discretization() const;
    [[nodiscard]] TariffSet tariff() const;
};

/// Parses a JSON scenario. Throws InvalidInput on bad content, IoError when unreadable.
ScenarioConfig parse_config(std::istream& in, const std::filesystem::path& base_dir);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Reads `loc,rate_kw,plugs`; absent (loc, rate) pairs are zero.
std::vector<std::vector<double>> load_plugs(std::istream& in, std::size_t n_locations,
                                            const ChargerCatalog& catalog);
std::vector<std::vector<double>> load_plugs_file(const std::filesystem::path& path,
                                                 std::size_t n_locations,
                                                 const ChargerCatalog& catalog);

/// Inputs materialized from a config, ready to assemble.
struct Problem {
    ExpandedGraph graph;
    DemandTable demand;
    TariffSet tariff;
    AssemblyMode mode;
    /// Baseline plug scale factor (1 unless a target capacity was configured).
    double baseline_scale = 1.0;
};

Problem build_problem(const ScenarioConfig& cfg);

} // namespace eamod::cli

#endif
