#include "support/fixtures.hpp"

#include <eamod/errors.hpp>
#include <eamod/lp_io.hpp>
#include <eamod/lp_model.hpp>

#include <eamod_cli/config.hpp>

#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

using namespace eamod;

namespace {

VehicleSpec vehicle() {
    VehicleSpec v;
    v.battery_kwh = 40.0;
    v.efficiency_wh_per_km = 150.0;
    v.max_charge_kw = 50.0;
    v.charge_efficiency = 1.0;
    return v;
}

TariffSet flat_tariff(const ExpandedGraph& g, double energy = 0.1) {
    TariffSet t;
    t.tou.price_per_step.assign(static_cast<std::size_t>(g.disc().n_t), energy);
    t.demand_charge_usd_per_kw = 0.05;
    t.maintenance_usd_per_km = 0.05;
    t.fleet_usd_per_vehicle_horizon = 20.0;
    t.station_usd_per_plug_horizon = g.catalog().cost_per_plug_horizon_usd;
    return t;
}

// One charging zone, three rates. With 1 kWh units over 15 min each unit adds 4 kW, so
// 1 unit falls in the 7.7 class, 2 units in 16.8 and 5 units in 50.
ExpandedGraph three_rate_zone() {
    const Discretization disc{15.0, 3, 1.0, 20};
    const ChargerCatalog cat{{7.7, 16.8, 50.0}, {2.61, 3.55, 13.36}};
    return build_expanded_graph(RoadGraph({Location{0, "a", false, 0, 0}}, {}), disc, vehicle(), cat);
}

ArcId charge_arc(const ExpandedGraph& g, int t, int c, int units) {
    for (ArcId a = 0; a < g.arc_count(); ++a) {
        const auto& arc = g.arc(a);
        if (arc.kind == ArcKind::Charge && arc.tail.t == t && arc.tail.c == c && arc.units == units) {
            return a;
        }
    }
    FAIL("no such charge arc");
    return 0;
}

const cli::Problem& minicity() {
    static const auto p = cli::build_problem(cli::load_config(testing::minicity_config()));
    return p;
}

} // namespace

TEST_SUITE("lpcore") {

TEST_CASE("nested plug rows on the three-rate example") {
    const auto g = three_rate_zone();
    const auto lp = assemble(g, DemandTable{}, flat_tariff(g));
    std::vector<double> x(lp.vars.size(), 0.0);
    x[charge_arc(g, 1, 1, 1)] = 4.0; // 7.7 class
    x[charge_arc(g, 1, 1, 2)] = 2.0; // 16.8 class
    x[charge_arc(g, 1, 1, 5)] = 3.0; // 50 class
    CHECK(g.arc(charge_arc(g, 1, 1, 1)).rate_class == 0);
    CHECK(g.arc(charge_arc(g, 1, 1, 2)).rate_class == 1);
    CHECK(g.arc(charge_arc(g, 1, 1, 5)).rate_class == 2);
    x[lp.vars.plug(0, 0)] = 0.0;
    x[lp.vars.plug(0, 1)] = 1.0;
    x[lp.vars.plug(0, 2)] = 5.0;

    std::vector<double> slack(3, 0.0);
    int found = 0;
    for (std::size_t i = 0; i < lp.model.num_rows(); ++i) {
        const auto& info = lp.model.row_info(i);
        if (info.family == RowFamily::StationCapacity && info.t == 1) {
            slack[static_cast<std::size_t>(info.index)] = lp.model.row_activity(i, x) - lp.model.rhs(i);
            ++found;
        }
    }
    REQUIRE(found == 3);
    CHECK(slack[2] == doctest::Approx(-2.0)); // 50 kW plugs cover the fast class
    CHECK(slack[1] == doctest::Approx(-1.0));
    CHECK(slack[0] == doctest::Approx(3.0)); // 9 vehicles, 6 plugs
    CHECK(residuals(lp.model, x).family(RowFamily::StationCapacity) == doctest::Approx(3.0));
    CHECK(testing::greedy_unserved(testing::class_flows(g, x, 0, 1),
                                   std::vector<double>{0.0, 1.0, 5.0})
          == doctest::Approx(3.0));
}

TEST_CASE("baseline mode fixes plugs and moves them to the right-hand side") {
    const auto g = three_rate_zone();
    const std::vector<std::vector<double>> plugs{{2.0, 1.0, 0.5}};
    const auto lp = assemble(g, DemandTable{}, flat_tariff(g), AssemblyMode::baseline(plugs));
    for (std::size_t r = 0; r < 3; ++r) {
        const auto j = lp.vars.plug(0, r);
        CHECK(lp.model.lower(j) == plugs[0][r]);
        CHECK(lp.model.upper(j) == plugs[0][r]);
    }
    for (std::size_t i = 0; i < lp.model.num_rows(); ++i) {
        const auto& info = lp.model.row_info(i);
        if (info.family == RowFamily::StationCapacity) {
            double expect = 0.0;
            for (int k = info.index; k < 3; ++k) {
                expect += plugs[0][static_cast<std::size_t>(k)];
            }
            CHECK(lp.model.rhs(i) == doctest::Approx(expect));
        }
    }
    CHECK_THROWS_AS(assemble(g, DemandTable{}, flat_tariff(g), AssemblyMode::baseline({{1.0, 1.0}})),
                    InvalidInput);
    CHECK_THROWS_AS(assemble(g, DemandTable{}, flat_tariff(g), AssemblyMode::baseline({{1.0, -1.0, 0.0}})),
                    InvalidInput);
}

TEST_CASE("zero demand solves to the empty fleet") {
    const auto g = three_rate_zone();
    const auto lp = assemble(g, DemandTable{}, flat_tariff(g));
    const auto res = solve(lp.model);
    REQUIRE(res.stats.status == SolveStatus::Optimal);
    CHECK(res.stats.objective == 0.0);
    CHECK(std::all_of(res.x.begin(), res.x.end(), [](double v) { return v == 0.0; }));
}

TEST_CASE("variable layout on the mini-city") {
    const auto& p = minicity();
    const auto lp = assemble(p.graph, p.demand, p.tariff);
    const auto n_loc = p.graph.location_count();
    const auto n_rates = p.graph.catalog().size();
    CHECK(lp.model.num_vars() == p.graph.arc_count() + n_loc * n_rates + n_loc + 1);
    CHECK(lp.model.var_name(lp.vars.fleet()) == "F");
    CHECK(lp.model.var_name(lp.vars.peak(1)) == "pmax_1");
    CHECK(lp.model.var_name(lp.vars.plug(2, 1)) == "s_2_r1");
}

TEST_CASE("assembly is deterministic") {
    const auto& p = minicity();
    const auto a = assemble(p.graph, p.demand, p.tariff);
    const auto b = assemble(p.graph, p.demand, p.tariff);
    REQUIRE(a.model.num_rows() == b.model.num_rows());
    std::ostringstream sa;
    std::ostringstream sb;
    write_mps(a.model, sa);
    write_mps(b.model, sb);
    CHECK(sa.str() == sb.str());
}

TEST_CASE("objective coefficients") {
    const auto& p = minicity();
    const auto lp = assemble(p.graph, p.demand, p.tariff);
    const auto& g = p.graph;
    for (ArcId a = 0; a < g.arc_count(); ++a) {
        const auto& arc = g.arc(a);
        double expect = 0.0;
        if (arc.kind == ArcKind::Charge) {
            expect = arc.grid_energy_kwh * p.tariff.tou.price(arc.tail.t);
        } else if (arc.kind == ArcKind::Travel) {
            expect = arc.distance_km * p.tariff.maintenance_usd_per_km;
        }
        CHECK(lp.model.cost(a) == doctest::Approx(expect).epsilon(1e-14));
    }
    CHECK(lp.model.cost(lp.vars.fleet()) == p.tariff.fleet_usd_per_vehicle_horizon);
    CHECK(lp.model.cost(lp.vars.peak(0)) == p.tariff.demand_charge_usd_per_kw);
    CHECK(lp.model.cost(lp.vars.plug(0, 1)) == p.tariff.station_usd_per_plug_horizon[1]);
}

TEST_CASE("residual families") {
    const auto& p = minicity();
    const auto lp = assemble(p.graph, p.demand, p.tariff);
    std::vector<double> x(lp.vars.size(), 0.0);
    double max_volume = 0.0;
    for (const auto& m : p.demand.requests) {
        max_volume = std::max(max_volume, m.volume);
    }
    auto rep = residuals(lp.model, x);
    CHECK(rep.family(RowFamily::Demand) == doctest::Approx(max_volume));
    CHECK(rep.family(RowFamily::Conservation) == 0.0);

    // Bump one interior idle arc: its tail and head nodes both lose balance.
    const auto& g = p.graph;
    ArcId idle = 0;
    for (ArcId a = 0; a < g.arc_count(); ++a) {
        if (g.arc(a).kind == ArcKind::Idle && g.arc(a).tail.t == 10) {
            idle = a;
            break;
        }
    }
    x[idle] = 1.0;
    const auto per_row = row_residuals(lp.model, x);
    int unit_rows = 0;
    for (std::size_t i = 0; i < per_row.size(); ++i) {
        if (lp.model.row_info(i).family == RowFamily::Conservation && per_row[i] > 0.0) {
            CHECK(per_row[i] == 1.0);
            ++unit_rows;
        }
    }
    CHECK(unit_rows == 2);
    x[idle] = -0.5;
    CHECK(residuals(lp.model, x).bounds == 0.5);
}

TEST_CASE("requests with no serving arc fail before solving") {
    const auto& p = minicity();
    auto demand = p.demand;
    demand.requests.push_back({0, 1, p.graph.disc().n_t, 1.0});
    try {
        (void)assemble(p.graph, demand, p.tariff);
        FAIL("expected InfeasibleRequest");
    } catch (const InfeasibleRequest& e) {
        CHECK(e.request_index == demand.requests.size() - 1);
        CHECK(e.depart_t == p.graph.disc().n_t);
    }
}

TEST_CASE("model validation") {
    LpModel m;
    m.add_variable("x", 1.0);
    CHECK_THROWS_AS(m.add_variable("x", 1.0), InvalidInput);
    CHECK_THROWS_AS(m.add_variable("y", 1.0, 2.0, 1.0), InvalidInput);
    const int cols[] = {0, 0, 3};
    const double vals[] = {1.0, 2.0, 1.0};
    CHECK_THROWS_AS(m.add_row("r", RowSense::Equal, 1.0, cols, vals), InvalidInput);
    m.add_row("r", RowSense::Equal, 1.0, std::span(cols, 2), std::span(vals, 2));
    const auto r = m.row(0);
    REQUIRE(r.cols.size() == 1);
    CHECK(r.vals[0] == 3.0);
}

TEST_CASE("LP and MPS export") {
    LpModel empty;
    std::ostringstream lp_text;
    std::ostringstream mps_text;
    write_lp(empty, lp_text);
    write_mps(empty, mps_text);
    CHECK(lp_text.str().find("End") != std::string::npos);
    CHECK(mps_text.str().find("ENDATA") != std::string::npos);

    LpModel m;
    m.name = "tiny";
    const int x = m.add_variable("x", 1.0 / 3.0);
    const int y = m.add_variable("y", -2.0, -1.0, 4.0);
    const int cols[] = {x, y};
    const double vals[] = {1.0, 1.0};
    m.add_row("cap", RowSense::LessEqual, 5.0, cols, vals);
    m.add_row("floor", RowSense::GreaterEqual, 0.1, cols, vals);
    m.add_row("fix", RowSense::Equal, 2.0, std::span(cols, 1), std::span(vals, 1));
    std::ostringstream lp2;
    write_lp(m, lp2);
    const auto s = lp2.str();
    CHECK(s.find("0.3333333333333333") != std::string::npos);
    CHECK(s.find("cap:") != std::string::npos);
    CHECK(s.find("-1 <= y <= 4") != std::string::npos);
    std::ostringstream mps;
    write_mps(m, mps);
    CHECK(mps.str().find(" L cap") != std::string::npos);
    CHECK(mps.str().find(" G floor") != std::string::npos);
    CHECK(mps.str().find(" E fix") != std::string::npos);
}

TEST_CASE("solution files") {
    LpModel m;
    m.add_variable("a", 1.0);
    m.add_variable("b", 1.0);
    const std::vector<double> x{0.0, 2.5};
    std::stringstream io;
    write_solution(m, x, io);
    CHECK(read_solution(m, io) == x);

    std::istringstream with_comment("# objective 2.5\nb 2.5\n\n");
    CHECK(read_solution(m, with_comment) == x);
    std::istringstream unknown("zz 1\n");
    CHECK_THROWS_AS(read_solution(m, unknown), NameMismatch);
    std::istringstream bad("a x\n");
    CHECK_THROWS_AS(read_solution(m, bad), InvalidInput);
    CHECK_THROWS_AS(import_solution(m, "/nonexistent/dir/sol.txt"), IoError);
}

TEST_CASE("incidence view lists each arc once per endpoint") {
    std::mt19937 rng(2);
    const auto inst = testing::random_instance(rng);
    const IncidenceView inc(inst.graph);
    std::vector<int> in_seen(inst.graph.arc_count(), 0);
    std::vector<int> out_seen(inst.graph.arc_count(), 0);
    for (NodeId v = 0; v < inc.node_count(); ++v) {
        for (auto a : inc.in_arcs(v)) {
            CHECK(inst.graph.node_id(inst.graph.arc(a).head) == v);
            ++in_seen[a];
        }
        for (auto a : inc.out_arcs(v)) {
            CHECK(inst.graph.node_id(inst.graph.arc(a).tail) == v);
            ++out_seen[a];
        }
    }
    CHECK(std::all_of(in_seen.begin(), in_seen.end(), [](int n) { return n == 1; }));
    CHECK(std::all_of(out_seen.begin(), out_seen.end(), [](int n) { return n == 1; }));
}

} // TEST_SUITE
