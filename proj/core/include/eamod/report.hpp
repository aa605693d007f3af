#ifndef EAMOD_REPORT_HPP
#define EAMOD_REPORT_HPP

#include "eamod/analysis.hpp"
#include "eamod/simplex.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace eamod {

/// Everything a finished run writes to its output directory.
struct RunReport {
    std::string scenario;
    std::string mode; // "joint" or "baseline"
    SolveStats stats;
    FleetSolution solution;
    CostBreakdown costs;
    Kpis kpis;
    SitingPlan siting;
    LoadSeries load;
    std::vector<StatusCounts> status;
    std::vector<std::string> location_names;
};

/// Summary rows shared by every report, in presentation order.
inline constexpr const char* kComparisonRows[] = {
    "station_cost_usd",  "energy_cost_usd",     "demand_charges_usd",
    "rebalancing_cost_usd", "total_cost_usd",   "energy_consumed_kwh",
    "peak_load_kw",      "rebalancing_distance_km",
};

/// Writes report.json (no timing data, so repeated runs are byte-identical).
void write_report_json(std::ostream& out, const RunReport& report);
/// Tidy long format: `t,loc,value`.
void write_load_csv(std::ostream& out, const RunReport& report);
/// Tidy long format: `t,status,count`.
void write_status_csv(std::ostream& out, const RunReport& report);
/// `loc,name,rate_kw,plugs,capacity_kw` plus a per-location total row per location.
void write_siting_csv(std::ostream& out, const RunReport& report);

/// Writes all report files into `dir`, creating it if needed. Throws IoError.
void write_reports(const std::filesystem::path& dir, const RunReport& report);

struct ComparisonRow {
    std::string name;
    double a = 0.0;
    double b = 0.0;
    /// (b - a) / |a| in percent; zero when both are zero, infinite when only a is.
    double percent_change = 0.0;
};

/// Compares two report.json documents row by row. Throws InvalidInput when either lacks
/// one of kComparisonRows, IoError when a file cannot be read.
std::vector<ComparisonRow> compare_reports(std::istream& a, std::istream& b);
std::vector<ComparisonRow> compare_report_files(const std::filesystem::path& a,
                                                const std::filesystem::path& b);

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);

} // namespace eamod

#endif
