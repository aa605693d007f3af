#include "eamod/report.hpp"

#include "eamod/errors.hpp"

#include <json.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

namespace eamod {
namespace {

using nlohmann::ordered_json;

std::string num(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), res.ptr};
}

// JSON has no infinities; they only show up in degenerate reports.
ordered_json jnum(double v) {
    if (!std::isfinite(v)) {
        return nullptr;
    }
    return v;
}

ordered_json summary_rows(const RunReport& r) {
    ordered_json j;
    j["station_cost_usd"] = jnum(r.costs.station_usd);
    j["energy_cost_usd"] = jnum(r.costs.energy_usd);
    j["demand_charges_usd"] = jnum(r.costs.demand_usd);
    j["rebalancing_cost_usd"] = jnum(r.costs.rebalancing_usd);
    j["total_cost_usd"] = jnum(r.costs.total_usd);
    j["energy_consumed_kwh"] = jnum(r.kpis.charging_energy_kwh);
    j["peak_load_kw"] = jnum(r.kpis.peak_load_kw);
    j["rebalancing_distance_km"] = jnum(r.kpis.rebalancing_distance_km);
    return j;
}

std::string location_name(const RunReport& r, std::size_t loc) {
    return loc < r.location_names.size() ? r.location_names[loc] : std::to_string(loc);
}

const char* status_names[] = {"idle", "charging", "passenger", "rebalancing"};

} // namespace

void write_report_json(std::ostream& out, const RunReport& r) {
    ordered_json j;
    j["scenario"] = r.scenario;
    j["mode"] = r.mode;

    ordered_json solver;
    solver["status"] = to_string(r.stats.status);
    solver["iterations"] = r.stats.iterations;
    solver["phase1_iterations"] = r.stats.phase1_iterations;
    solver["objective"] = jnum(r.stats.objective);
    solver["dual_bound"] = jnum(r.stats.dual_bound);
    if (!r.stats.infeasible_family.empty()) {
        solver["infeasible_family"] = r.stats.infeasible_family;
    }
    if (!r.stats.unbounded_ray.empty()) {
        solver["unbounded_ray"] = r.stats.unbounded_ray;
    }
    j["solver"] = solver;

    j["summary"] = summary_rows(r);

    ordered_json costs;
    costs["fleet_usd"] = jnum(r.costs.fleet_usd);
    costs["station_usd"] = jnum(r.costs.station_usd);
    costs["energy_usd"] = jnum(r.costs.energy_usd);
    costs["demand_usd"] = jnum(r.costs.demand_usd);
    costs["maintenance_usd"] = jnum(r.costs.maintenance_usd);
    costs["rebalancing_usd"] = jnum(r.costs.rebalancing_usd);
    costs["total_usd"] = jnum(r.costs.total_usd);
    j["costs"] = costs;

    ordered_json kpis;
    kpis["fleet_size"] = jnum(r.solution.fleet);
    kpis["charging_energy_kwh"] = jnum(r.kpis.charging_energy_kwh);
    kpis["peak_load_kw"] = jnum(r.kpis.peak_load_kw);
    kpis["sum_location_peak_kw"] = jnum(r.kpis.sum_peak_kw);
    kpis["travel_distance_km"] = jnum(r.kpis.travel_distance_km);
    kpis["rebalancing_distance_km"] = jnum(r.kpis.rebalancing_distance_km);
    kpis["installed_capacity_kw"] = jnum(r.kpis.installed_capacity_kw);
    j["kpis"] = kpis;

    ordered_json locs = ordered_json::array();
    for (std::size_t loc = 0; loc < r.siting.plugs.size(); ++loc) {
        ordered_json l;
        l["id"] = loc;
        l["name"] = location_name(r, loc);
        ordered_json plugs = ordered_json::array();
        for (double s : r.siting.plugs[loc]) {
            plugs.push_back(jnum(s));
        }
        l["plugs"] = plugs;
        l["capacity_kw"] = jnum(r.siting.capacity_kw[loc]);
        l["peak_kw"] = loc < r.solution.peak_kw.size() ? jnum(r.solution.peak_kw[loc]) : ordered_json(nullptr);
        locs.push_back(l);
    }
    ordered_json siting;
    siting["rates_kw"] = r.siting.rates_kw;
    siting["scale_factor"] = jnum(r.siting.scale_factor);
    siting["total_capacity_kw"] = jnum(r.siting.total_capacity_kw);
    siting["locations"] = locs;
    j["siting"] = siting;

    out << j.dump(2) << '\n';
}

void write_load_csv(std::ostream& out, const RunReport& r) {
    out << "t,loc,value\n";
    for (std::size_t t = 0; t < r.load.size(); ++t) {
        for (std::size_t loc = 0; loc < r.load[t].size(); ++loc) {
            out << t + 1 << ',' << location_name(r, loc) << ',' << num(r.load[t][loc]) << '\n';
        }
    }
}

void write_status_csv(std::ostream& out, const RunReport& r) {
    out << "t,status,count\n";
    for (std::size_t t = 0; t < r.status.size(); ++t) {
        const auto& s = r.status[t];
        const double counts[] = {s.idle, s.charging, s.passenger, s.rebalancing};
        for (std::size_t k = 0; k < 4; ++k) {
            out << t + 1 << ',' << status_names[k] << ',' << num(counts[k]) << '\n';
        }
    }
}

void write_siting_csv(std::ostream& out, const RunReport& r) {
    out << "loc,name,rate_kw,plugs,capacity_kw\n";
    for (std::size_t loc = 0; loc < r.siting.plugs.size(); ++loc) {
        const auto name = location_name(r, loc);
        for (std::size_t k = 0; k < r.siting.rates_kw.size(); ++k) {
            const double s = r.siting.plugs[loc][k];
            out << loc << ',' << name << ',' << num(r.siting.rates_kw[k]) << ',' << num(s) << ','
                << num(s * r.siting.rates_kw[k]) << '\n';
        }
        out << loc << ',' << name << ",all,," << num(r.siting.capacity_kw[loc]) << '\n';
    }
}

void write_reports(const std::filesystem::path& dir, const RunReport& report) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
    const auto emit = [&](const char* file, void (*writer)(std::ostream&, const RunReport&)) {
        const auto path = dir / file;
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw IoError("cannot open " + path.string() + " for writing");
        }
        writer(out, report);
        if (!out) {
            throw IoError("failed writing " + path.string());
        }
    };
    emit("report.json", write_report_json);
    emit("charging_load.csv", write_load_csv);
    emit("vehicle_status.csv", write_status_csv);
    emit("siting.csv", write_siting_csv);
}

std::vector<ComparisonRow> compare_reports(std::istream& a, std::istream& b) {
    const auto parse = [](std::istream& in, const char* which) {
        try {
            return nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw InvalidInput(std::string("report ") + which + " is not valid JSON: " + e.what());
        }
    };
    const auto ja = parse(a, "A");
    const auto jb = parse(b, "B");
    const auto lookup = [](const nlohmann::json& j, const char* row, const char* which) {
        if (!j.contains("summary") || !j["summary"].contains(row) || !j["summary"][row].is_number()) {
            throw InvalidInput(std::string("report ") + which + " has no summary row '" + row + "'");
        }
        return j["summary"][row].get<double>();
    };
    std::vector<ComparisonRow> rows;
    for (const char* name : kComparisonRows) {
        ComparisonRow row{name, lookup(ja, name, "A"), lookup(jb, name, "B"), 0.0};
        if (row.a != 0.0) {
            row.percent_change = 100.0 * (row.b - row.a) / std::abs(row.a);
        } else if (row.b != 0.0) {
            row.percent_change = std::copysign(std::numeric_limits<double>::infinity(), row.b);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ComparisonRow> compare_report_files(const std::filesystem::path& a,
                                                const std::filesystem::path& b) {
    std::ifstream fa(a);
    if (!fa) {
        throw IoError("cannot open report " + a.string());
    }
    std::ifstream fb(b);
    if (!fb) {
        throw IoError("cannot open report " + b.string());
    }
    return compare_reports(fa, fb);
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
    out << "row,a,b,percent_change\n";
    for (const auto& r : rows) {
        out << r.name << ',' << num(r.a) << ',' << num(r.b) << ',' << num(r.percent_change) << '\n';
    }
}

} // namespace eamod
