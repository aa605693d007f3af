#include "eamod_cli/config.hpp"

#include <eamod/csv.hpp>
#include <eamod/errors.hpp>

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace eamod::cli {
namespace {

using nlohmann::json;

const json& section(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_object()) {
        throw InvalidInput(std::string("config is missing section '") + key + "'");
    }
    return j[key];
}

double number(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
        throw InvalidInput(std::string("config key '") + key + "' must be a number");
    }
    return j[key].get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
    return j.contains(key) ? number(j, key) : fallback;
}

std::string string_or(const json& j, const char* key, std::string fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    if (!j[key].is_string()) {
        throw InvalidInput(std::string("config key '") + key + "' must be a string");
    }
    return j[key].get<std::string>();
}

std::vector<double> numbers(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array()) {
        throw InvalidInput(std::string("config key '") + key + "' must be an array of numbers");
    }
    std::vector<double> out;
    for (const auto& v : j[key]) {
        if (!v.is_number()) {
            throw InvalidInput(std::string("config key '") + key + "' must be an array of numbers");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

} // namespace

Discretization ScenarioConfig::discretization() const {
    return Discretization::for_vehicle(vehicle, dt_min, n_t, unit_kwh, n_c);
}

TariffSet ScenarioConfig::tariff() const {
    TariffSet t;
    t.tou = build_tou(tou_windows, tou_default_price, discretization());
    t.demand_charge_usd_per_kw = demand_charge_usd_per_kw;
    t.maintenance_usd_per_km = maintenance_usd_per_km;
    t.fleet_usd_per_vehicle_horizon = fleet_usd_per_vehicle;
    t.station_usd_per_plug_horizon = catalog.cost_per_plug_horizon_usd;
    return t;
}

ScenarioConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw InvalidInput("config must be a JSON object");
    }

    ScenarioConfig cfg;
    try {
        cfg.name = string_or(j, "name", cfg.name);

        const auto& data = section(j, "data");
        if (!data.contains("locations") || !data.contains("road")) {
            throw InvalidInput("config data section needs 'locations' and 'road'");
        }
        cfg.locations_csv = resolve(base_dir, string_or(data, "locations", ""));
        cfg.road_csv = resolve(base_dir, string_or(data, "road", ""));
        if (data.contains("demand")) {
            cfg.demand_csv = resolve(base_dir, string_or(data, "demand", ""));
        }
        const auto fmt = string_or(data, "demand_format", "hourly");
        if (fmt == "hourly") {
            cfg.demand_format = DemandFormat::Hourly;
        } else if (fmt == "step") {
            cfg.demand_format = DemandFormat::Step;
        } else {
            throw InvalidInput("demand_format must be 'hourly' or 'step', got '" + fmt + "'");
        }

        const auto& veh = section(j, "vehicle");
        cfg.vehicle.battery_kwh = number(veh, "battery_kwh");
        cfg.vehicle.efficiency_wh_per_km = number(veh, "efficiency_wh_per_km");
        cfg.vehicle.soc_min = number_or(veh, "soc_min", cfg.vehicle.soc_min);
        cfg.vehicle.soc_max = number_or(veh, "soc_max", cfg.vehicle.soc_max);
        cfg.vehicle.max_charge_kw = number(veh, "max_charge_kw");
        cfg.vehicle.charge_efficiency = number_or(veh, "charge_efficiency", 1.0);

        const auto& disc = section(j, "discretization");
        cfg.dt_min = number_or(disc, "dt_min", cfg.dt_min);
        const double n_t = number_or(disc, "n_t", cfg.n_t);
        if (n_t != std::floor(n_t)) {
            throw InvalidInput("n_t must be an integer");
        }
        cfg.n_t = static_cast<int>(n_t);
        cfg.unit_kwh = number(disc, "unit_kwh");
        if (disc.contains("n_c")) {
            const double n_c = number(disc, "n_c");
            if (n_c != std::floor(n_c)) {
                throw InvalidInput("n_c must be an integer");
            }
            cfg.n_c = static_cast<int>(n_c);
        }

        const auto& ch = section(j, "chargers");
        cfg.catalog.rates_kw = numbers(ch, "rates_kw");
        cfg.catalog.cost_per_plug_horizon_usd = numbers(ch, "plug_price_usd");
        const auto side = string_or(ch, "efficiency_side", "grid");
        if (side == "grid") {
            cfg.graph.efficiency_side = EfficiencySide::Grid;
        } else if (side == "battery") {
            cfg.graph.efficiency_side = EfficiencySide::Battery;
        } else {
            throw InvalidInput("efficiency_side must be 'grid' or 'battery', got '" + side + "'");
        }
        if (ch.contains("at_passthrough")) {
            if (!ch["at_passthrough"].is_boolean()) {
                throw InvalidInput("chargers.at_passthrough must be true or false");
            }
            cfg.graph.chargers_at_passthrough = ch["at_passthrough"].get<bool>();
        }

        const auto& tar = section(j, "tariff");
        const double days = cfg.horizon_days();
        const auto& tou = section(tar, "tou");
        cfg.tou_default_price = number(tou, "default_price");
        if (tou.contains("windows")) {
            for (const auto& w : tou["windows"]) {
                cfg.tou_windows.push_back(
                    {number(w, "start_hour"), number(w, "end_hour"), number(w, "price")});
            }
        }
        if (tar.contains("demand_charge_usd_per_kw")) {
            cfg.demand_charge_usd_per_kw = number(tar, "demand_charge_usd_per_kw");
        } else {
            const auto& dc = section(tar, "demand_charge");
            cfg.demand_charge_usd_per_kw = rescale_monthly_demand_charge(
                number(dc, "monthly_usd_per_block"), number(dc, "block_kw"), days);
        }
        cfg.maintenance_usd_per_km = number(tar, "maintenance_usd_per_km");
        if (tar.contains("fleet_usd_per_vehicle")) {
            cfg.fleet_usd_per_vehicle = number(tar, "fleet_usd_per_vehicle");
        } else {
            const auto& fl = section(tar, "fleet");
            cfg.fleet_usd_per_vehicle =
                fleet_price_per_horizon(number(fl, "sale_usd"), number(fl, "depreciation_per_year"),
                                        number(fl, "fixed_annual_usd"), days);
        }

        if (j.contains("mode")) {
            const auto mode = string_or(j, "mode", "joint");
            if (mode == "joint") {
                cfg.mode = AssemblyMode::Kind::Joint;
            } else if (mode == "baseline") {
                cfg.mode = AssemblyMode::Kind::Baseline;
            } else {
                throw InvalidInput("mode must be 'joint' or 'baseline', got '" + mode + "'");
            }
        }
        if (j.contains("baseline")) {
            const auto& b = j["baseline"];
            cfg.baseline_plugs_csv = resolve(base_dir, string_or(b, "plugs", ""));
            if (b.contains("target_capacity_kw")) {
                cfg.baseline_target_kw = number(b, "target_capacity_kw");
            }
        }

        if (j.contains("solver")) {
            const auto& s = j["solver"];
            cfg.solver.feasibility_tol = number_or(s, "feasibility_tol", cfg.solver.feasibility_tol);
            cfg.solver.optimality_tol = number_or(s, "optimality_tol", cfg.solver.optimality_tol);
            cfg.solver.max_iters =
                static_cast<long>(number_or(s, "max_iters", static_cast<double>(cfg.solver.max_iters)));
            if (s.contains("refactor_interval")) {
                cfg.solver.refactor_interval = static_cast<int>(number(s, "refactor_interval"));
            }
            if (s.contains("scaling")) {
                cfg.solver.scaling = s["scaling"].get<bool>();
            }
        }
        cfg.output_dir = resolve(base_dir, string_or(j, "output", "out"));
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("config: ") + e.what());
    }

    cfg.vehicle.validate();
    cfg.catalog.validate();
    cfg.solver.validate();
    if (cfg.mode == AssemblyMode::Kind::Baseline && cfg.baseline_plugs_csv.empty()) {
        throw InvalidInput("baseline mode needs baseline.plugs");
    }
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config " + path.string());
    }
    return parse_config(in, path.parent_path());
}

std::vector<std::vector<double>> load_plugs(std::istream& in, std::size_t n_locations,
                                            const ChargerCatalog& catalog) {
    const auto table = csv::Table::read(in, "plugs");
    table.require({"loc", "rate_kw", "plugs"});
    std::vector<std::vector<double>> plugs(n_locations, std::vector<double>(catalog.size(), 0.0));
    for (std::size_t r = 0; r < table.rows(); ++r) {
        const long loc = table.integer(r, "loc");
        if (loc < 0 || static_cast<std::size_t>(loc) >= n_locations) {
            throw UnknownLocation(loc);
        }
        const double rate = table.number(r, "rate_kw");
        std::size_t k = 0;
        while (k < catalog.size() && std::abs(catalog.rates_kw[k] - rate) > 1e-9) {
            ++k;
        }
        if (k == catalog.size()) {
            throw InvalidInput("plugs line " + std::to_string(table.line(r)) + ": rate "
                               + table.cell(r, "rate_kw") + " kW is not in the charger catalog");
        }
        const double s = table.number(r, "plugs");
        if (!(s >= 0.0)) {
            throw InvalidInput("plugs line " + std::to_string(table.line(r))
                               + ": plug count must be nonnegative");
        }
        plugs[static_cast<std::size_t>(loc)][k] += s;
    }
    return plugs;
}

std::vector<std::vector<double>> load_plugs_file(const std::filesystem::path& path,
                                                 std::size_t n_locations,
                                                 const ChargerCatalog& catalog) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open plugs file " + path.string());
    }
    return load_plugs(in, n_locations, catalog);
}

Problem build_problem(const ScenarioConfig& cfg) {
    const auto disc = cfg.discretization();
    auto road = RoadGraph::from_csv_files(cfg.locations_csv, cfg.road_csv, cfg.vehicle);

    DemandTable demand;
    if (!cfg.demand_csv.empty()) {
        demand = cfg.demand_format == DemandFormat::Hourly
                     ? load_hourly_demand_file(cfg.demand_csv, road, disc)
                     : load_step_demand_file(cfg.demand_csv, road, disc);
    }

    const std::size_t n_loc = road.location_count();
    Problem p{build_expanded_graph(std::move(road), disc, cfg.vehicle, cfg.catalog, cfg.graph),
              std::move(demand), cfg.tariff(), AssemblyMode::joint(), 1.0};
    p.tariff.validate(disc, cfg.catalog);

    if (cfg.mode == AssemblyMode::Kind::Baseline) {
        auto plugs = load_plugs_file(cfg.baseline_plugs_csv, n_loc, cfg.catalog);
        if (cfg.baseline_target_kw) {
            auto plan = scale_baseline(plugs, cfg.catalog.rates_kw, *cfg.baseline_target_kw);
            p.baseline_scale = plan.scale_factor;
            plugs = std::move(plan.plugs);
        }
        p.mode = AssemblyMode::baseline(std::move(plugs));
    }
    return p;
}

} // namespace eamod::cli
