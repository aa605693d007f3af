#include <eamod/lp_model.hpp>
#include <eamod/netgraph.hpp>

#include <eamod_cli/config.hpp>

#include <benchmark/benchmark.h>

namespace {

const eamod::cli::ScenarioConfig& minicity() {
    static const auto cfg = eamod::cli::load_config(EAMOD_SOURCE_DIR "/scenarios/minicity/scenario.json");
    return cfg;
}

void BM_BuildExpandedGraph(benchmark::State& state) {
    const auto& cfg = minicity();
    auto disc = cfg.discretization();
    disc.unit_kwh = cfg.vehicle.usable_kwh() / static_cast<double>(state.range(0) - 1);
    disc.n_c = static_cast<int>(state.range(0));
    const auto road = eamod::RoadGraph::from_csv_files(cfg.locations_csv, cfg.road_csv, cfg.vehicle);
    std::size_t arcs = 0;
    for (auto _ : state) {
        auto g = eamod::build_expanded_graph(road, disc, cfg.vehicle, cfg.catalog, cfg.graph);
        arcs = g.arc_count();
        benchmark::DoNotOptimize(arcs);
    }
    state.counters["arcs"] = static_cast<double>(arcs);
}
BENCHMARK(BM_BuildExpandedGraph)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_AssembleLp(benchmark::State& state) {
    const auto p = eamod::cli::build_problem(minicity());
    for (auto _ : state) {
        auto lp = eamod::assemble(p.graph, p.demand, p.tariff, p.mode);
        benchmark::DoNotOptimize(lp.model.num_nonzeros());
    }
}
BENCHMARK(BM_AssembleLp)->Unit(benchmark::kMillisecond);

} // namespace
