#include "cch/driver.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "cch/snapshot.hpp"
#include "cch/spectral.hpp"

namespace cch {
namespace {

struct StrictViolation {
    std::string what;
};

std::string snapshot_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "snap_%04d.bin", index);
    return buf;
}

} // namespace

std::filesystem::path output_root() {
    if (const char* env = std::getenv("CCH_OUTPUT_ROOT"); env && *env)
        return std::filesystem::path(env);
    return std::filesystem::current_path();
}

RunResult execute_run(const RunConfig& config, const std::filesystem::path& run_dir,
                      bool strict_override) {
    config.validate();
    const bool strict = config.diagnostics.strict || strict_override;
    const bool with_source_bound = config.diagnostics.source_bound_enabled(config.model.theta);

    RunResult result;
    result.run_dir = run_dir;
    std::filesystem::create_directories(run_dir / "snapshots");

    {
        std::ofstream cfg(run_dir / "config.ini", std::ios::trunc);
        cfg << serialize_config(config);
        if (!cfg) throw std::runtime_error("cannot write config copy in " + run_dir.string());
    }

    std::ofstream csv(run_dir / "diagnostics.csv", std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot open diagnostics.csv in " + run_dir.string());
    write_csv_header(csv);

    SolverState state;
    state.u = spectral::project(build_initial_field(config.initial, config.domain),
                                config.domain.dealias_cutoff());
    state.dt = default_dt(state.u, config.model, config.stepper);

    DiagnosticsRecord rec = make_record(0.0, state.u, config.model, config.diagnostics.eps_deg,
                                        nullptr, with_source_bound);
    result.records.push_back(rec);
    append_csv_row(csv, rec);

    const std::vector<double> snap_times = config.run.resolved_snapshot_times();
    int snap_index = 0;
    auto take_snapshot = [&](const SolverState& s) {
        write_snapshot(run_dir / "snapshots" / snapshot_name(snap_index),
                       spectral::inverse(s.u), s.t);
        ++snap_index;
    };
    std::vector<double> hits;
    for (double t : snap_times) {
        if (t == 0.0)
            take_snapshot(state);
        else
            hits.push_back(t);
    }

    DiagnosticsRecord prev = rec;
    std::string status = "completed";
    SolverState last_good = state; // most recent accepted state, for failure paths

    RunCallbacks callbacks;
    callbacks.on_warning = [&](const std::string& msg) { result.warnings.push_back(msg); };
    callbacks.on_hit = [&](const SolverState& s) { take_snapshot(s); };
    callbacks.on_accept = [&](const SolverState& s) {
        last_good = s;
        const bool last = s.t == config.run.t_end;
        if (s.step_count % config.diagnostics.record_every != 0 && !last) return;
        const DiagnosticsRecord now = make_record(s.t, s.u, config.model,
                                                  config.diagnostics.eps_deg, &prev,
                                                  with_source_bound);
        result.records.push_back(now);
        append_csv_row(csv, now);
        const double tol = config.diagnostics.tol_ineq * (1.0 + std::abs(prev.energy));
        if (now.ineq_residual > tol) {
            ++result.inequality_violations;
            result.warnings.push_back("energy-inequality residual " +
                                      std::to_string(now.ineq_residual) + " above tolerance " +
                                      std::to_string(tol) + " at t = " + std::to_string(s.t));
            if (strict)
                throw StrictViolation{"energy inequality violated at t = " +
                                      std::to_string(s.t)};
        }
        prev = now;
    };

    try {
        state = run(state, config.model, config.stepper, config.run.t_end, hits, callbacks);
        result.final_state = state;
    } catch (const StrictViolation& v) {
        status = "violation: " + v.what;
        result.exit_code = kExitViolation;
        result.final_state = last_good;
    } catch (const blowup_error& e) {
        status = std::string("blowup: ") + e.what();
        result.exit_code = kExitBlowup;
        result.blew_up = true;
        // Persist the last accepted (finite) state.
        try {
            write_snapshot(run_dir / "snapshots" / "failed_state.bin",
                           spectral::inverse(last_good.u), last_good.t);
        } catch (...) {
            // The diagnostics stream up to the failure is already on disk.
        }
        result.final_state = last_good;
    }

    {
        std::ofstream summary(run_dir / "summary.txt", std::ios::trunc);
        summary << "status = " << status << "\n";
        summary << "t_final = ";
        {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", result.records.back().t);
            summary << buf << "\n";
        }
        summary << "steps = " << result.final_state.step_count << "\n";
        summary << "records = " << result.records.size() << "\n";
        summary << "snapshots = " << snap_index << "\n";
        summary << "inequality_violations = " << result.inequality_violations << "\n";
        summary << "warnings = " << result.warnings.size() << "\n";
    }
    return result;
}

} // namespace cch
