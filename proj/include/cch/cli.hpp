#pragma once

#include <filesystem>
#include <string>

namespace cch {

/// Command entry points used by the binary and exercised in-process by the
/// tests. All return the documented exit codes: 0 ok, 1 I/O or internal
/// failure, 2 parse error, 3 validation error, 4 blow-up, 5 invariant
/// violation (strict mode).

/// Execute one run; results land in `<output root>/<output_dir>/run-NNN/`.
int cmd_run(const std::filesystem::path& config_path, bool strict = false, int jobs = 1);

/// Dispatch an experiment manifest (run_set, theta_continuation,
/// n_refinement, mms_verify, gronwall_fit).
int cmd_sweep(const std::filesystem::path& manifest_path, bool strict = false, int jobs = 1);

/// Run the config and check the invariant suite (mass conservation, energy
/// monotonicity for beta = 0, per-step energy inequality). Violations are
/// reported; with strict mode they set exit code 5.
int cmd_verify(const std::filesystem::path& config_path, bool strict = false);

/// Convert every snapshot of a run directory to csv or txt next to the
/// binary files.
int cmd_export(const std::filesystem::path& run_dir, const std::string& format);

} // namespace cch
