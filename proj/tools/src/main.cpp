#include "eamod_cli/commands.hpp"

#include <eamod/errors.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>

namespace {

using namespace eamod::cli;

int run_validate(const std::string& config) {
    const auto cfg = load_config(config);
    const auto d = cmd_validate(cfg);
    for (const auto& w : d.warnings) {
        std::cout << "warning: " << w << '\n';
    }
    for (const auto& e : d.errors) {
        std::cout << "error: " << e << '\n';
    }
    if (d.ok()) {
        std::cout << "ok: " << cfg.name << '\n';
        return kExitOk;
    }
    return kExitValidation;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint fleet operation and charging-infrastructure planning for electric "
                 "autonomous mobility-on-demand"};
    app.require_subcommand(1);

    std::string config;
    std::string mode;
    std::string out_dir;
    double solver_tol = 0.0;
    bool export_only = false;

    auto* validate = app.add_subcommand("validate", "Check a scenario without solving");
    validate->add_option("config", config, "Scenario JSON file")->required();

    auto* run = app.add_subcommand("run", "Solve a scenario and write reports");
    run->add_option("config", config, "Scenario JSON file")->required();
    run->add_flag("--export-only", export_only, "Write model.lp and model.mps and stop");
    run->add_option("--mode", mode, "Override the configured mode")
        ->check(CLI::IsMember({"joint", "baseline"}));
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--solver-tol", solver_tol, "Primal and dual feasibility tolerance");

    std::string run_a;
    std::string run_b;
    std::string compare_out;
    auto* compare = app.add_subcommand("compare", "Compare two runs row by row");
    compare->add_option("run_a", run_a, "Reference run directory or report.json")->required();
    compare->add_option("run_b", run_b, "Other run directory or report.json")->required();
    compare->add_option("--out", compare_out, "Also write comparison.csv into this directory");

    double target_kw = -1.0;
    auto* scale = app.add_subcommand("scale-baseline",
                                     "Scale the present-day plug layout to a target capacity");
    scale->add_option("config", config, "Scenario JSON file")->required();
    scale->add_option("--target-kw", target_kw, "Target total capacity in kW");
    scale->add_option("--out", out_dir, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            return run_validate(config);
        }
        if (run->parsed()) {
            RunOptions opts;
            opts.export_only = export_only;
            if (!mode.empty()) {
                opts.mode = mode == "joint" ? eamod::AssemblyMode::Kind::Joint
                                            : eamod::AssemblyMode::Kind::Baseline;
            }
            if (!out_dir.empty()) {
                opts.out_dir = out_dir;
            }
            if (run->count("--solver-tol") > 0) {
                opts.solver_tol = solver_tol;
            }
            const auto outcome = cmd_run(load_config(config), opts, std::cerr);
            (outcome.exit_code == kExitOk ? std::cout : std::cerr) << outcome.message << '\n';
            return outcome.exit_code;
        }
        if (compare->parsed()) {
            const auto rows = cmd_compare(run_a, run_b);
            std::cout << std::left << std::setw(26) << "row" << std::right << std::setw(18) << "a"
                      << std::setw(18) << "b" << std::setw(12) << "change %" << '\n';
            for (const auto& r : rows) {
                std::cout << std::left << std::setw(26) << r.name << std::right << std::fixed
                          << std::setprecision(4) << std::setw(18) << r.a << std::setw(18) << r.b
                          << std::setprecision(2) << std::setw(12) << r.percent_change << '\n';
            }
            if (!compare_out.empty()) {
                std::filesystem::create_directories(compare_out);
                std::ofstream f(std::filesystem::path(compare_out) / "comparison.csv");
                if (!f) {
                    throw eamod::IoError("cannot write comparison.csv in " + compare_out);
                }
                write_comparison_csv(f, rows);
            }
            return kExitOk;
        }
        if (scale->parsed()) {
            const auto cfg = load_config(config);
            double target = target_kw;
            if (scale->count("--target-kw") == 0) {
                if (!cfg.baseline_target_kw) {
                    throw eamod::InvalidInput("no --target-kw given and none in the config");
                }
                target = *cfg.baseline_target_kw;
            }
            const auto dir = out_dir.empty() ? cfg.output_dir : std::filesystem::path(out_dir);
            const auto plan = cmd_scale_baseline(cfg, target, dir);
            std::cout << std::setprecision(10) << "scale factor " << plan.scale_factor
                      << ", total capacity " << plan.total_capacity_kw << " kW\n";
            return kExitOk;
        }
    } catch (...) {
        return report_exception(std::cerr);
    }
    return kExitFailure;
}
