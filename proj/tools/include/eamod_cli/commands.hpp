#ifndef EAMOD_CLI_COMMANDS_HPP
#define EAMOD_CLI_COMMANDS_HPP

#include "eamod_cli/config.hpp"

#include <eamod/report.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace eamod::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1, // solver gave up, unbounded, or the solution failed verification
    kExitInfeasible = 2,
    kExitValidation = 3,
    kExitIo = 4,
};

/// Maps the in-flight exception to an exit code and prints it. Call from a catch block.
int report_exception(std::ostream& err);

struct Diagnostics {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;

    [[nodiscard]] bool ok() const { return errors.empty(); }
};

Diagnostics cmd_validate(const ScenarioConfig& cfg);

struct RunOptions {
    bool export_only = false;
    std::optional<AssemblyMode::Kind> mode;
    std::optional<std::filesystem::path> out_dir;
    std::optional<double> solver_tol;
};

struct RunOutcome {
    int exit_code = kExitOk;
    std::string message;
    /// Filled once the solver returns Optimal.
    std::optional<RunReport> report;
    std::optional<VerifyReport> verification;
    std::size_t n_vars = 0;
    std::size_t n_rows = 0;
};

/// Build, assemble, solve, verify and write reports. With export_only the model is
/// written as model.lp and model.mps and nothing is solved. Domain errors propagate.
RunOutcome cmd_run(const ScenarioConfig& cfg, const RunOptions& opts, std::ostream& log);

/// Solved report without writing anything; shared by cmd_run and the tests.
RunOutcome solve_scenario(const ScenarioConfig& cfg, const Problem& problem,
                          const SolverConfig& solver, std::ostream& log);

/// Accepts report.json files or run directories containing one.
std::vector<ComparisonRow> cmd_compare(const std::filesystem::path& run_a,
                                       const std::filesystem::path& run_b);

/// Scales the configured present-day plugs to `target_kw` and writes siting.csv to `out_dir`.
SitingPlan cmd_scale_baseline(const ScenarioConfig& cfg, double target_kw,
                              const std::filesystem::path& out_dir);

} // namespace eamod::cli

#endif
