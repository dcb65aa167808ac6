#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cch/config.hpp"
#include "cch/diagnostics.hpp"
#include "cch/integrator.hpp"

namespace cch {

/// Exit codes shared by the library entry points and the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitParse = 2,
    kExitValidation = 3,
    kExitBlowup = 4,
    kExitViolation = 5,
};

struct RunResult {
    int exit_code = kExitOk;
    std::filesystem::path run_dir;
    SolverState final_state;
    std::vector<DiagnosticsRecord> records;
    std::vector<std::string> warnings;
    int inequality_violations = 0;
    bool blew_up = false;
};

/// Execute one configured run into run_dir, producing the documented layout:
///   run_dir/config.ini        exact copy of the effective config
///   run_dir/snapshots/*.bin   fields at the configured instants
///   run_dir/diagnostics.csv   one record per record_every-th accepted step
///   run_dir/summary.txt       status, counters, final norms
/// Inequality violations are warnings unless strict (config or argument)
/// makes them fatal (exit 5, run stopped). Blow-up persists the last good
/// state under snapshots/ and returns exit 4 instead of throwing.
RunResult execute_run(const RunConfig& config, const std::filesystem::path& run_dir,
                      bool strict_override = false);

/// Default root for relative output paths: the CCH_OUTPUT_ROOT environment
/// variable when set, otherwise the current directory.
std::filesystem::path output_root();

} // namespace cch
