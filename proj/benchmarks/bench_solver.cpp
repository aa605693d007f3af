#include <eamod/lp_model.hpp>
#include <eamod/simplex.hpp>

#include <eamod_cli/config.hpp>

#include <benchmark/benchmark.h>

namespace {

void BM_SolveMiniCity(benchmark::State& state) {
    const auto cfg = eamod::cli::load_config(EAMOD_SOURCE_DIR "/scenarios/minicity/scenario.json");
    const auto p = eamod::cli::build_problem(cfg);
    const auto lp = eamod::assemble(p.graph, p.demand, p.tariff, p.mode);
    eamod::SolverConfig solver = cfg.solver;
    solver.refactor_interval = static_cast<int>(state.range(0));
    long iterations = 0;
    for (auto _ : state) {
        const auto res = eamod::solve(lp.model, solver);
        iterations = res.stats.iterations;
        benchmark::DoNotOptimize(res.stats.objective);
    }
    state.counters["iterations"] = static_cast<double>(iterations);
}
BENCHMARK(BM_SolveMiniCity)->Arg(50)->Arg(100)->Unit(benchmark::kSecond)->Iterations(1);

} // namespace
