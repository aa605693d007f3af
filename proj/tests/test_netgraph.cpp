#include "support/fixtures.hpp"

#include <eamod/errors.hpp>
#include <eamod/netgraph.hpp>

#include <doctest.h>

#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace eamod;

namespace {

VehicleSpec test_vehicle() {
    VehicleSpec v;
    v.battery_kwh = 10.0;
    v.efficiency_wh_per_km = 200.0;
    v.soc_min = 0.2;
    v.soc_max = 0.8;
    v.max_charge_kw = 50.0;
    v.charge_efficiency = 1.0;
    return v;
}

RoadGraph single_location() {
    return RoadGraph({Location{0, "a", false, 0.0, 0.0}}, {});
}

std::size_t count_kind(const ExpandedGraph& g, ArcKind kind) {
    std::size_t n = 0;
    for (const auto& a : g.arcs()) {
        n += a.kind == kind ? 1 : 0;
    }
    return n;
}

} // namespace

TEST_SUITE("netgraph") {

TEST_CASE("road arcs round up onto the grid") {
    const Discretization disc{15.0, 96, 0.74, 23};
    RoadArc exact{0, 1, 3.5, 15.0, 0.7};
    auto g = discretize_road_arc(exact, disc);
    CHECK(g.steps == 1);
    CHECK(g.units == 1);

    RoadArc longer{0, 1, 7.5, 20.0, 1.5};
    g = discretize_road_arc(longer, disc);
    CHECK(g.steps == 2);
    CHECK(g.units == 3);

    RoadArc too_far{0, 1, 100.0, 45.0, 20.0};
    CHECK_THROWS_AS(discretize_road_arc(too_far, disc), InfeasibleArc);
    try {
        discretize_road_arc(too_far, disc);
    } catch (const InfeasibleArc& e) {
        CHECK(e.units == 28);
        CHECK(e.usable_units == 22);
    }
}

TEST_CASE("rounding never lowers the unit count as energy grows") {
    const Discretization disc{15.0, 96, 0.74, 40};
    int last = 0;
    for (double e = 0.01; e < 25.0; e += 0.037) {
        const auto g = discretize_road_arc(RoadArc{0, 1, 1.0, 10.0, e}, disc);
        CHECK(g.units >= last);
        last = g.units;
    }
}

TEST_CASE("charge level count follows the usable battery window") {
    VehicleSpec v = test_vehicle();
    v.battery_kwh = 16.0;
    CHECK(Discretization::for_vehicle(v, 15.0, 96, 3.2).n_c == 4);
    CHECK(Discretization::for_vehicle(v, 15.0, 96, 1.2).n_c == 9);
    CHECK(Discretization::for_vehicle(v, 15.0, 96, 1.2, 12).n_c == 12);
    CHECK_THROWS_AS(Discretization::for_vehicle(v, 15.0, 96, 0.0), InvalidInput);
}

TEST_CASE("single location enumeration") {
    const Discretization disc{15.0, 3, 0.74, 3};
    const ChargerCatalog cat{{7.7}, {1.0}};
    const auto g = build_expanded_graph(single_location(), disc, test_vehicle(), cat);
    CHECK(count_kind(g, ArcKind::Idle) == 6);
    CHECK(count_kind(g, ArcKind::Charge) == 6);
    CHECK(count_kind(g, ArcKind::Travel) == 0);
    CHECK(g.max_charge_units() == 2);
    for (const auto& a : g.arcs()) {
        if (a.kind == ArcKind::Charge) {
            CHECK(a.head.c <= 3);
            CHECK(a.rate_class == 0);
        }
    }
}

TEST_CASE("empty catalog yields travel and idle arcs only") {
    const Discretization disc{15.0, 4, 0.74, 3};
    const auto g = build_expanded_graph(single_location(), disc, test_vehicle(), ChargerCatalog{});
    CHECK(count_kind(g, ArcKind::Charge) == 0);
    CHECK(count_kind(g, ArcKind::Idle) == 9);
}

TEST_CASE("two fully connected locations with one-step one-unit arcs") {
    std::vector<Location> locs{{0, "a", false, 0, 0}, {1, "b", false, 0, 0}};
    std::vector<RoadArc> arcs;
    for (int o = 0; o < 2; ++o) {
        for (int d = 0; d < 2; ++d) {
            arcs.push_back({o, d, 1.0, 10.0, 0.5});
        }
    }
    const Discretization disc{15.0, 2, 0.74, 2};
    const auto g = build_expanded_graph(RoadGraph(locs, arcs), disc, test_vehicle(), ChargerCatalog{});
    CHECK(count_kind(g, ArcKind::Travel) == 4);
    CHECK(count_kind(g, ArcKind::Idle) == 4);
    for (const auto& a : g.arcs()) {
        if (a.kind == ArcKind::Travel) {
            CHECK(a.tail.t == 1);
            CHECK(a.tail.c == 2);
        }
    }
}

TEST_CASE("charging power on both sides of the charger") {
    const Discretization disc{15.0, 96, 0.74, 10};
    VehicleSpec v = test_vehicle();
    v.charge_efficiency = 0.9;
    ExpArc a;
    a.kind = ArcKind::Charge;
    a.units = 1;
    auto p = arc_power_kw(a, disc, v);
    CHECK(p.battery_kw == doctest::Approx(2.96).epsilon(1e-12));
    CHECK(p.grid_kw == doctest::Approx(3.2888889).epsilon(1e-7));

    v.charge_efficiency = 1.0;
    a.units = 4;
    p = arc_power_kw(a, disc, v);
    CHECK(p.battery_kw == doctest::Approx(11.84).epsilon(1e-12));
    CHECK(p.grid_kw == doctest::Approx(11.84).epsilon(1e-12));

    a.kind = ArcKind::Idle;
    CHECK_THROWS_AS(arc_power_kw(a, disc, v), NonChargeArc);
}

TEST_CASE("pass-through offsets are added once per endpoint") {
    std::istringstream locs("id,name,is_passthrough,distance_offset_km,time_offset_min\n"
                            "0,city,false,0,0\n"
                            "1,bridge,true,9,12\n");
    std::istringstream road("origin,dest,distance_km,travel_time_min\n"
                            "0,1,2,5\n"
                            "1,0,2,5\n"
                            "0,0,1,3\n");
    const auto g = RoadGraph::from_csv(locs, road, test_vehicle());
    const auto& out = g.arcs()[*g.find_arc(0, 1)];
    CHECK(out.distance_km == doctest::Approx(11.0));
    CHECK(out.travel_time_min == doctest::Approx(17.0));
    CHECK(out.energy_kwh == doctest::Approx(2.2));
    CHECK(g.arcs()[*g.find_arc(0, 0)].distance_km == doctest::Approx(1.0));
    CHECK_FALSE(g.find_arc(1, 1).has_value());
}

TEST_CASE("road graph rejects duplicate routes and unknown ids") {
    std::vector<Location> locs{{0, "a", false, 0, 0}};
    CHECK_THROWS_AS(RoadGraph(locs, {{0, 0, 1, 5, 0.2}, {0, 0, 2, 5, 0.4}}), InvalidInput);
    CHECK_THROWS(RoadGraph(locs, {{0, 3, 1, 5, 0.2}}));
}

TEST_CASE("generated arcs satisfy their kind invariants") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = testing::random_instance(rng);
        const auto& g = inst.graph;
        const auto& disc = g.disc();
        std::map<std::tuple<int, int, int>, std::set<int>> units_at;
        for (const auto& a : g.arcs()) {
            CHECK(a.head.t <= disc.n_t);
            CHECK(a.tail.c >= 1);
            CHECK(a.head.c <= disc.n_c);
            switch (a.kind) {
            case ArcKind::Idle:
                CHECK(a.head.loc == a.tail.loc);
                CHECK(a.head.t == a.tail.t + 1);
                CHECK(a.head.c == a.tail.c);
                CHECK(a.distance_km == 0.0);
                CHECK(a.grid_energy_kwh == 0.0);
                break;
            case ArcKind::Charge: {
                CHECK(a.head.loc == a.tail.loc);
                CHECK(a.head.t == a.tail.t + 1);
                CHECK(a.head.c - a.tail.c == a.units);
                CHECK(a.units >= 1);
                const double battery_kw = a.units * disc.unit_kwh / disc.dt_hours();
                const auto& rates = g.catalog().rates_kw;
                CHECK(battery_kw <= std::min(rates[a.rate_class], g.vehicle().max_charge_kw) + 1e-9);
                if (a.rate_class > 0) {
                    CHECK(rates[a.rate_class - 1] < battery_kw);
                }
                CHECK(a.grid_energy_kwh
                      == doctest::Approx(a.battery_energy_kwh / g.vehicle().charge_efficiency));
                CHECK(units_at[{a.tail.loc, a.tail.t, a.tail.c}].insert(a.units).second);
                break;
            }
            case ArcKind::Travel: {
                const auto& road = g.road().arcs()[static_cast<std::size_t>(a.road_arc)];
                const auto grid = discretize_road_arc(road, disc);
                CHECK(a.tail.loc == road.origin);
                CHECK(a.head.loc == road.dest);
                CHECK(a.head.t - a.tail.t == grid.steps);
                CHECK(a.tail.c - a.head.c == grid.units);
                CHECK(a.head.t - a.tail.t >= 1);
                CHECK(a.tail.c - a.head.c >= 1);
                break;
            }
            }
        }
        for (std::size_t loc = 0; loc < g.location_count(); ++loc) {
            if (g.road().locations()[loc].is_passthrough) {
                CHECK_FALSE(g.charging_allowed(static_cast<int>(loc)));
            }
        }
    }
}

TEST_CASE("rate class is monotone in units") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = testing::random_instance(rng);
        std::map<int, int> cls;
        for (const auto& a : inst.graph.arcs()) {
            if (a.kind == ArcKind::Charge) {
                cls[a.units] = a.rate_class;
            }
        }
        int last = -1;
        for (const auto& [u, c] : cls) {
            CHECK(c >= last);
            last = c;
        }
    }
}

TEST_CASE("locations with identical roads get isomorphic arc sets") {
    std::vector<Location> locs{{0, "a", false, 0, 0}, {1, "b", false, 0, 0}};
    std::vector<RoadArc> arcs{{0, 0, 2.0, 10.0, 0.4}, {1, 1, 2.0, 10.0, 0.4}};
    const Discretization disc{15.0, 6, 0.74, 5};
    const ChargerCatalog cat{{3.7, 7.7}, {1.0, 2.0}};
    const auto g = build_expanded_graph(RoadGraph(locs, arcs), disc, test_vehicle(), cat);
    std::multiset<std::tuple<int, int, int, int, int, int>> per_loc[2];
    for (const auto& a : g.arcs()) {
        per_loc[a.tail.loc].insert({a.tail.t, a.tail.c, a.head.t, a.head.c,
                                    static_cast<int>(a.kind), a.rate_class});
    }
    CHECK(per_loc[0] == per_loc[1]);
}

} // TEST_SUITE
