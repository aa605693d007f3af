#include "eamod_cli/commands.hpp"

#include <eamod/errors.hpp>
#include <eamod/lp_io.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <ostream>

namespace eamod::cli {

int report_exception(std::ostream& err) {
    try {
        throw;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const InfeasibleRequest& e) {
        err << "infeasible: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const Error& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

Diagnostics cmd_validate(const ScenarioConfig& cfg) {
    Diagnostics d;
    const auto disc = cfg.discretization();
    disc.validate();
    const auto road = RoadGraph::from_csv_files(cfg.locations_csv, cfg.road_csv, cfg.vehicle);

    double smallest_trip = std::numeric_limits<double>::infinity();
    std::vector<char> arc_ok(road.arcs().size(), 1);
    for (std::size_t a = 0; a < road.arcs().size(); ++a) {
        const auto& arc = road.arcs()[a];
        if (arc.energy_kwh > 0.0) {
            smallest_trip = std::min(smallest_trip, arc.energy_kwh);
        }
        try {
            discretize_road_arc(arc, disc);
        } catch (const InfeasibleArc& e) {
            arc_ok[a] = 0;
            d.errors.emplace_back(e.what());
        }
    }
    if (std::isfinite(smallest_trip) && cfg.unit_kwh > smallest_trip) {
        d.warnings.push_back("charge unit " + std::to_string(cfg.unit_kwh)
                             + " kWh exceeds the smallest trip energy "
                             + std::to_string(smallest_trip) + " kWh; short trips will be rounded up");
    }

    DemandTable demand;
    if (!cfg.demand_csv.empty()) {
        try {
            demand = cfg.demand_format == DemandFormat::Hourly
                         ? load_hourly_demand_file(cfg.demand_csv, road, disc)
                         : load_step_demand_file(cfg.demand_csv, road, disc);
        } catch (const MissingRoute& e) {
            d.errors.emplace_back(e.what());
        } catch (const UnknownLocation& e) {
            d.errors.emplace_back(std::string("demand: ") + e.what());
        }
    }
    if (!d.ok()) {
        return d;
    }

    const auto g = build_expanded_graph(road, disc, cfg.vehicle, cfg.catalog, cfg.graph);
    for (std::size_t i = 0; i < demand.requests.size(); ++i) {
        try {
            request_arcs(g, demand.requests[i]);
        } catch (const NoFeasibleArc& e) {
            d.errors.push_back("request #" + std::to_string(i) + ": " + e.what());
        }
    }
    bool any_charger = false;
    for (std::size_t loc = 0; loc < road.location_count(); ++loc) {
        any_charger = any_charger || g.charging_allowed(static_cast<int>(loc));
    }
    if (!any_charger || cfg.catalog.empty()) {
        d.warnings.emplace_back("no location can host chargers; the fleet cannot recharge");
    }
    if (cfg.mode == AssemblyMode::Kind::Baseline) {
        try {
            load_plugs_file(cfg.baseline_plugs_csv, road.location_count(), cfg.catalog);
        } catch (const IoError&) {
            throw;
        } catch (const Error& e) {
            d.errors.push_back(std::string("baseline plugs: ") + e.what());
        }
    }
    return d;
}

RunOutcome solve_scenario(const ScenarioConfig& cfg, const Problem& problem,
                          const SolverConfig& solver, std::ostream& log) {
    const auto lp = assemble(problem.graph, problem.demand, problem.tariff, problem.mode);
    RunOutcome out;
    out.n_vars = lp.model.num_vars();
    out.n_rows = lp.model.num_rows();
    log << "model: " << out.n_vars << " variables, " << out.n_rows << " rows, "
        << lp.model.num_nonzeros() << " nonzeros\n";

    const auto res = solve(lp.model, solver);
    log << "solver: " << to_string(res.stats.status) << " after " << res.stats.iterations
        << " iterations\n";
    switch (res.stats.status) {
    case SolveStatus::Optimal:
        break;
    case SolveStatus::Infeasible:
        out.exit_code = kExitInfeasible;
        out.message = "LP infeasible; largest violation in " + res.stats.infeasible_family + " rows";
        return out;
    case SolveStatus::Unbounded:
        out.exit_code = kExitFailure;
        out.message = "LP unbounded along " + res.stats.unbounded_ray;
        return out;
    case SolveStatus::IterLimit:
        out.exit_code = kExitFailure;
        out.message = "iteration limit reached";
        return out;
    }

    const auto& g = problem.graph;
    RunReport r;
    r.scenario = cfg.name;
    r.mode = problem.mode.kind == AssemblyMode::Kind::Joint ? "joint" : "baseline";
    r.stats = res.stats;
    r.solution = decode_solution(g, problem.demand, lp.vars, res.x, res.stats.objective);
    r.costs = cost_breakdown(r.solution, problem.tariff, g);
    r.kpis = compute_kpis(r.solution, g);
    r.siting = make_siting_plan(r.solution.plugs, g.catalog().rates_kw);
    r.siting.scale_factor = problem.baseline_scale;
    r.load = charging_load_series(g, r.solution.flows);
    r.status = vehicle_status_series(g, r.solution.flows, r.solution.rebalance);
    for (const auto& l : g.road().locations()) {
        r.location_names.push_back(l.name);
    }

    out.verification = verify(lp.model, res.x);
    const double gap = std::abs(r.costs.total_usd - res.stats.objective);
    if (!out.verification->ok()) {
        out.exit_code = kExitFailure;
        out.message = "solution failed verification (max residual "
                      + std::to_string(out.verification->residuals.max()) + ", "
                      + std::to_string(out.verification->slack_peaks.size()) + " slack peaks)";
    } else if (gap > 1e-6 * std::max(1.0, std::abs(res.stats.objective))) {
        out.exit_code = kExitFailure;
        out.message = "recomputed cost differs from the solver objective by " + std::to_string(gap);
    } else {
        out.message = "optimal total cost " + std::to_string(r.costs.total_usd) + " USD";
    }
    out.report = std::move(r);
    return out;
}

RunOutcome cmd_run(const ScenarioConfig& base, const RunOptions& opts, std::ostream& log) {
    ScenarioConfig cfg = base;
    if (opts.mode) {
        cfg.mode = *opts.mode;
        if (cfg.mode == AssemblyMode::Kind::Baseline && cfg.baseline_plugs_csv.empty()) {
            throw InvalidInput("baseline mode needs baseline.plugs in the config");
        }
    }
    if (opts.out_dir) {
        cfg.output_dir = *opts.out_dir;
    }
    if (opts.solver_tol) {
        cfg.solver.feasibility_tol = *opts.solver_tol;
        cfg.solver.optimality_tol = *opts.solver_tol;
        cfg.solver.validate();
    }

    const auto problem = build_problem(cfg);
    if (opts.export_only) {
        const auto lp = assemble(problem.graph, problem.demand, problem.tariff, problem.mode);
        std::error_code ec;
        std::filesystem::create_directories(cfg.output_dir, ec);
        if (ec) {
            throw IoError("cannot create output directory " + cfg.output_dir.string());
        }
        export_lp(lp.model, cfg.output_dir / "model.lp");
        export_mps(lp.model, cfg.output_dir / "model.mps");
        RunOutcome out;
        out.n_vars = lp.model.num_vars();
        out.n_rows = lp.model.num_rows();
        out.message = "wrote " + (cfg.output_dir / "model.lp").string() + " and model.mps";
        return out;
    }

    auto out = solve_scenario(cfg, problem, cfg.solver, log);
    if (out.report) {
        write_reports(cfg.output_dir, *out.report);
    }
    return out;
}

std::vector<ComparisonRow> cmd_compare(const std::filesystem::path& run_a,
                                       const std::filesystem::path& run_b) {
    const auto as_file = [](const std::filesystem::path& p) {
        return std::filesystem::is_directory(p) ? p / "report.json" : p;
    };
    return compare_report_files(as_file(run_a), as_file(run_b));
}

SitingPlan cmd_scale_baseline(const ScenarioConfig& cfg, double target_kw,
                              const std::filesystem::path& out_dir) {
    if (cfg.baseline_plugs_csv.empty()) {
        throw InvalidInput("config has no baseline.plugs file to scale");
    }
    const auto road = RoadGraph::from_csv_files(cfg.locations_csv, cfg.road_csv, cfg.vehicle);
    const auto plugs = load_plugs_file(cfg.baseline_plugs_csv, road.location_count(), cfg.catalog);
    auto plan = scale_baseline(plugs, cfg.catalog.rates_kw, target_kw);

    RunReport r;
    r.siting = plan;
    for (const auto& l : road.locations()) {
        r.location_names.push_back(l.name);
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + out_dir.string());
    }
    std::ofstream out(out_dir / "siting.csv", std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + (out_dir / "siting.csv").string());
    }
    write_siting_csv(out, r);
    return plan;
}

} // namespace eamod::cli
