#include "support/fixtures.hpp"

#include <eamod/errors.hpp>
#include <eamod/report.hpp>

#include <eamod_cli/commands.hpp>
#include <eamod_cli/config.hpp>

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace eamod;
namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path()
               / ("eamod_cli_" + std::to_string(std::random_device{}()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

const char* kScenario = R"({
  "name": "tiny",
  "data": {"locations": "locations.csv", "road": "road.csv", "demand": "demand.csv",
           "demand_format": "step"},
  "vehicle": {"battery_kwh": 10, "efficiency_wh_per_km": 200, "max_charge_kw": 22,
              "charge_efficiency": 0.9},
  "discretization": {"dt_min": 60, "n_t": 8, "unit_kwh": 1.5},
  "chargers": {"rates_kw": [3.7, 11], "plug_price_usd": [0.5, 1.2]},
  "tariff": {
    "tou": {"default_price": 0.2, "windows": [{"start_hour": 4, "end_hour": 6, "price": 0.4}]},
    "demand_charge_usd_per_kw": 0.05,
    "maintenance_usd_per_km": 0.05,
    "fleet_usd_per_vehicle": 10
  },
  "mode": "joint",
  "baseline": {"plugs": "plugs.csv"}
})";

// Two zones 6 km apart: 1.2 kWh, one unit.
fs::path tiny_scenario(const fs::path& dir, const std::string& demand = "origin,dest,step,volume\n"
                                                                         "0,1,2,3\n1,0,5,2\n0,0,3,1\n") {
    write_file(dir / "locations.csv",
               "id,name,is_passthrough,distance_offset_km,time_offset_min\n0,a,false,0,0\n1,b,false,0,0\n");
    write_file(dir / "road.csv", "origin,dest,distance_km,travel_time_min\n0,1,6,20\n1,0,6,20\n0,0,2,10\n");
    write_file(dir / "demand.csv", demand);
    write_file(dir / "plugs.csv", "loc,rate_kw,plugs\n0,3.7,2\n1,11,1\n");
    write_file(dir / "scenario.json", kScenario);
    return dir / "scenario.json";
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("configuration parsing") {
    TempDir tmp;
    const auto cfg = cli::load_config(tiny_scenario(tmp.path));
    CHECK(cfg.name == "tiny");
    CHECK(cfg.locations_csv == tmp.path / "locations.csv");
    CHECK(cfg.demand_format == cli::DemandFormat::Step);
    CHECK(cfg.discretization().n_c == 5);
    CHECK(cfg.catalog.size() == 2);
    CHECK(cfg.tariff().tou.price(5) == 0.4);
    CHECK(cfg.tariff().fleet_usd_per_vehicle_horizon == 10.0);

    std::istringstream broken("{\"name\": ");
    CHECK_THROWS_AS(cli::parse_config(broken, tmp.path), InvalidInput);
    std::istringstream no_vehicle(R"({"data": {"locations": "l", "road": "r"}})");
    CHECK_THROWS_AS(cli::parse_config(no_vehicle, tmp.path), InvalidInput);
    CHECK_THROWS_AS(cli::load_config(tmp.path / "missing.json"), IoError);
}

TEST_CASE("bundled reference configs parse") {
    for (const char* name : {"spring.json", "leaf.json", "model3.json"}) {
        const auto cfg = cli::load_config(testing::source_dir() / "scenarios" / "sf_reference" / name);
        CHECK(cfg.catalog.size() == 4);
        CHECK(cfg.unit_kwh == 0.74);
    }
}

TEST_CASE("plug tables") {
    const ChargerCatalog cat{{3.7, 11.0}, {0.5, 1.2}};
    std::istringstream in("loc,rate_kw,plugs\n1,11,4\n0,3.7,2.5\n");
    const auto plugs = cli::load_plugs(in, 2, cat);
    CHECK(plugs[0][0] == 2.5);
    CHECK(plugs[0][1] == 0.0);
    CHECK(plugs[1][1] == 4.0);
    std::istringstream bad_rate("loc,rate_kw,plugs\n0,7.7,1\n");
    CHECK_THROWS_AS(cli::load_plugs(bad_rate, 2, cat), InvalidInput);
    std::istringstream bad_loc("loc,rate_kw,plugs\n5,3.7,1\n");
    CHECK_THROWS(cli::load_plugs(bad_loc, 2, cat));
}

TEST_CASE("validate reports problems without solving") {
    TempDir tmp;
    auto cfg = cli::load_config(tiny_scenario(tmp.path));
    CHECK(cli::cmd_validate(cfg).ok());

    write_file(tmp.path / "demand.csv", "origin,dest,step,volume\n1,1,2,3\n");
    auto d = cli::cmd_validate(cfg);
    REQUIRE_FALSE(d.ok());
    CHECK(d.errors[0].find("1->1") != std::string::npos);

    write_file(tmp.path / "demand.csv", "origin,dest,step,volume\n0,1,2,3\n");
    write_file(tmp.path / "road.csv", "origin,dest,distance_km,travel_time_min\n0,1,60,20\n1,0,6,20\n");
    d = cli::cmd_validate(cfg);
    REQUIRE_FALSE(d.ok());
    CHECK(d.errors[0].find("0->1") != std::string::npos);
}

TEST_CASE("export only writes the model files") {
    TempDir tmp;
    const auto cfg = cli::load_config(tiny_scenario(tmp.path));
    cli::RunOptions opts;
    opts.export_only = true;
    opts.out_dir = tmp.path / "out";
    std::ostringstream log;
    const auto outcome = cli::cmd_run(cfg, opts, log);
    CHECK(outcome.exit_code == cli::kExitOk);
    CHECK(fs::exists(tmp.path / "out" / "model.lp"));
    CHECK(fs::exists(tmp.path / "out" / "model.mps"));
    CHECK_FALSE(fs::exists(tmp.path / "out" / "report.json"));
    CHECK(outcome.n_vars > 0);
}

TEST_CASE("joint and baseline runs, then compare") {
    TempDir tmp;
    const auto cfg = cli::load_config(tiny_scenario(tmp.path));
    std::ostringstream log;
    cli::RunOptions joint;
    joint.out_dir = tmp.path / "joint";
    const auto a = cli::cmd_run(cfg, joint, log);
    REQUIRE(a.exit_code == cli::kExitOk);
    REQUIRE(a.report.has_value());
    CHECK(a.verification->ok());
    for (const char* f : {"report.json", "charging_load.csv", "vehicle_status.csv", "siting.csv"}) {
        CHECK(fs::exists(tmp.path / "joint" / f));
    }

    cli::RunOptions base = joint;
    base.mode = AssemblyMode::Kind::Baseline;
    base.out_dir = tmp.path / "base";
    const auto b = cli::cmd_run(cfg, base, log);
    REQUIRE(b.exit_code == cli::kExitOk);
    CHECK(b.report->mode == "baseline");
    CHECK(b.report->solution.plugs[0][0] == 2.0);
    CHECK(b.report->solution.plugs[1][1] == 1.0);
    CHECK(a.report->stats.objective <= b.report->stats.objective + 1e-6);

    const auto same = cli::cmd_compare(tmp.path / "joint", tmp.path / "joint" / "report.json");
    for (const auto& row : same) {
        CHECK(row.percent_change == 0.0);
    }
    const auto diff = cli::cmd_compare(tmp.path / "joint", tmp.path / "base");
    REQUIRE(diff.size() == std::size(kComparisonRows));
    CHECK(diff[4].name == "total_cost_usd");
    CHECK(diff[4].percent_change >= -1e-9);

    // Reports carry no timing, so a repeat run is byte-identical.
    cli::RunOptions again = joint;
    again.out_dir = tmp.path / "joint2";
    REQUIRE(cli::cmd_run(cfg, again, log).exit_code == cli::kExitOk);
    CHECK(read_file(tmp.path / "joint" / "report.json") == read_file(tmp.path / "joint2" / "report.json"));
}

TEST_CASE("compare rejects reports missing a row") {
    TempDir tmp;
    write_file(tmp.path / "a.json", R"({"summary": {"total_cost_usd": 1}})");
    CHECK_THROWS_AS(cli::cmd_compare(tmp.path / "a.json", tmp.path / "a.json"), InvalidInput);
    CHECK_THROWS_AS(cli::cmd_compare(tmp.path / "none", tmp.path / "a.json"), IoError);
}

TEST_CASE("scale-baseline writes the scaled siting table") {
    TempDir tmp;
    const auto cfg = cli::load_config(tiny_scenario(tmp.path));
    const auto plan = cli::cmd_scale_baseline(cfg, 36.8, tmp.path / "scaled");
    CHECK(plan.scale_factor == doctest::Approx(2.0));
    CHECK(fs::exists(tmp.path / "scaled" / "siting.csv"));
}

TEST_CASE("exceptions map to exit codes") {
    auto code = [](auto thrower) {
        std::ostringstream err;
        try {
            thrower();
        } catch (...) {
            return cli::report_exception(err);
        }
        return -1;
    };
    CHECK(code([] { throw IoError("x"); }) == cli::kExitIo);
    CHECK(code([] { throw InvalidInput("x"); }) == cli::kExitValidation);
    CHECK(code([] { throw InfeasibleRequest(0, NoFeasibleArc(0, 1, 3)); }) == cli::kExitInfeasible);
    CHECK(code([] { throw std::runtime_error("x"); }) == cli::kExitFailure);
}

} // TEST_SUITE
