#include "cch/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "cch/diagnostics.hpp"
#include "cch/driver.hpp"
#include "cch/experiments.hpp"
#include "cch/ini.hpp"
#include "cch/snapshot.hpp"

namespace cch {
namespace {

std::filesystem::path resolve_output(const std::string& dir) {
    std::filesystem::path p(dir);
    return p.is_absolute() ? p : output_root() / p;
}

/// Next free run-NNN directory under base (deterministic given the
/// directory contents).
std::filesystem::path next_run_dir(const std::filesystem::path& base) {
    std::filesystem::create_directories(base);
    for (int i = 1; i < 100000; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "run-%03d", i);
        const std::filesystem::path candidate = base / buf;
        if (!std::filesystem::exists(candidate)) return candidate;
    }
    throw std::runtime_error("run directory namespace exhausted under " + base.string());
}

int classify_exception() {
    try {
        throw;
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const blowup_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBlowup;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

void report_run(const RunResult& result) {
    std::cout << "run dir: " << result.run_dir.string() << "\n";
    std::cout << "records: " << result.records.size()
              << ", steps: " << result.final_state.step_count
              << ", inequality violations: " << result.inequality_violations << "\n";
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
}

struct VerifyFindings {
    int mass_violations = 0;
    int energy_violations = 0;
    double worst_mass_drift = 0.0;
    double worst_energy_rise = 0.0;
};

VerifyFindings verify_records(const RunConfig& config,
                              const std::vector<DiagnosticsRecord>& records) {
    VerifyFindings f;
    if (records.empty()) return f;
    const double mass0 = records.front().mass;
    const double mass_tol = 1e-10 * (1.0 + std::abs(mass0));
    const bool drift_free = config.model.beta_norm2() == 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const double drift = std::abs(records[i].mass - mass0);
        f.worst_mass_drift = std::max(f.worst_mass_drift, drift);
        if (drift > mass_tol) ++f.mass_violations;
        if (drift_free && i > 0) {
            const double rise = records[i].energy - records[i - 1].energy;
            const double tol = 1e-12 * (1.0 + std::abs(records[i - 1].energy));
            f.worst_energy_rise = std::max(f.worst_energy_rise, rise);
            if (rise > tol) ++f.energy_violations;
        }
    }
    return f;
}

int dispatch_sweep(const std::filesystem::path& manifest_path, bool strict, int jobs);

} // namespace

int cmd_run(const std::filesystem::path& config_path, bool strict, int /*jobs*/) {
    try {
        const RunConfig config = load_config_file(config_path);
        const std::filesystem::path run_dir =
            next_run_dir(resolve_output(config.run.output_dir));
        const RunResult result = execute_run(config, run_dir, strict);
        report_run(result);
        return result.exit_code;
    } catch (...) {
        return classify_exception();
    }
}

int cmd_verify(const std::filesystem::path& config_path, bool strict) {
    try {
        const RunConfig config = load_config_file(config_path);
        const std::filesystem::path run_dir =
            next_run_dir(resolve_output(config.run.output_dir) / "verify");
        const RunResult result = execute_run(config, run_dir, strict);
        report_run(result);
        if (result.exit_code != kExitOk) return result.exit_code;

        const VerifyFindings f = verify_records(config, result.records);
        std::cout << "mass drift: worst " << f.worst_mass_drift << ", violations "
                  << f.mass_violations << "\n";
        if (config.model.beta_norm2() == 0.0)
            std::cout << "energy monotonicity: worst rise " << f.worst_energy_rise
                      << ", violations " << f.energy_violations << "\n";
        std::cout << "energy inequality violations: " << result.inequality_violations << "\n";

        const int total =
            f.mass_violations + f.energy_violations + result.inequality_violations;
        if (total > 0) {
            std::cerr << "verify: " << total << " invariant violation(s)\n";
            if (strict || config.diagnostics.strict) return kExitViolation;
        }
        return kExitOk;
    } catch (...) {
        return classify_exception();
    }
}

int cmd_export(const std::filesystem::path& run_dir, const std::string& format) {
    try {
        if (format != "csv" && format != "txt") {
            std::cerr << "error: format must be csv or txt\n";
            return kExitValidation;
        }
        const std::filesystem::path snaps = run_dir / "snapshots";
        if (!std::filesystem::is_directory(snaps)) {
            std::cerr << "error: no snapshots directory under " << run_dir.string() << "\n";
            return kExitFailure;
        }
        int converted = 0;
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(snaps))
            if (entry.path().extension() == ".bin") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            const Snapshot snap = load_snapshot(f);
            std::filesystem::path out = f;
            out.replace_extension("." + format);
            export_snapshot_text(snap, out, format);
            ++converted;
        }
        std::cout << "exported " << converted << " snapshot(s)\n";
        return converted > 0 ? kExitOk : kExitFailure;
    } catch (...) {
        return classify_exception();
    }
}

int cmd_sweep(const std::filesystem::path& manifest_path, bool strict, int jobs) {
    try {
        return dispatch_sweep(manifest_path, strict, jobs);
    } catch (...) {
        return classify_exception();
    }
}

namespace {

int dispatch_sweep(const std::filesystem::path& manifest_path, bool strict, int jobs) {
    std::ifstream is(manifest_path);
    if (!is) {
        std::cerr << "error: cannot open manifest: " << manifest_path.string() << "\n";
        return kExitFailure;
    }
    std::stringstream ss;
    ss << is.rdbuf();
    IniFile ini = IniFile::parse(ss.str());
    const std::filesystem::path manifest_dir = manifest_path.parent_path();

    const std::string type = ini.get_string("experiment.type", "");
    if (type.empty()) throw validation_error("experiment.type", "required");
    const std::string out_name = ini.get_string("experiment.output_dir", type);
    const std::filesystem::path out_root = resolve_output(out_name);

    auto load_base = [&]() {
        const std::string rel = ini.get_string("experiment.base_config", "");
        if (rel.empty()) throw validation_error("experiment.base_config", "required");
        std::filesystem::path p(rel);
        if (p.is_relative()) p = manifest_dir / p;
        return load_config_file(p);
    };

    if (type == "run_set") {
        const auto configs = ini.get_string_list("sweep.configs", {});
        if (configs.empty()) throw validation_error("sweep.configs", "required");
        ini.reject_unused();
        int worst = kExitOk;
        for (const auto& rel : configs) {
            std::filesystem::path p(rel);
            if (p.is_relative()) p = manifest_dir / p;
            const RunConfig config = load_config_file(p);
            const std::filesystem::path run_dir =
                next_run_dir(out_root / p.stem().string());
            const RunResult result = execute_run(config, run_dir, strict);
            report_run(result);
            worst = std::max(worst, result.exit_code);
        }
        return worst;
    }

    if (type == "theta_continuation") {
        const RunConfig base = load_base();
        const auto thetas = ini.get_double_list("theta_continuation.thetas", {});
        if (thetas.empty()) throw validation_error("theta_continuation.thetas", "required");
        ini.reject_unused();
        const ContinuationResult r = theta_continuation(base, thetas, out_root, jobs);
        for (std::size_t i = 0; i < r.pairwise_l2.size(); ++i)
            std::cout << "d_" << i + 1 << " (theta " << r.thetas[i] << " vs "
                      << r.thetas[i + 1] << "): " << r.pairwise_l2[i] << "\n";
        const bool any_failed = std::any_of(r.failed.begin(), r.failed.end(),
                                            [](bool b) { return b; });
        return any_failed ? kExitBlowup : kExitOk;
    }

    if (type == "n_refinement") {
        const RunConfig base = load_base();
        const auto n_list = ini.get_int_list("n_refinement.n_list", {});
        if (n_list.empty()) throw validation_error("n_refinement.n_list", "required");
        ini.reject_unused();
        const RefinementResult r = n_refinement(base, n_list, out_root, jobs);
        for (std::size_t i = 0; i < r.n_values.size(); ++i)
            std::cout << "N = " << r.n_values[i] << ": error_at_end " << r.error_at_end[i]
                      << ", error_max " << r.error_max[i] << "\n";
        return kExitOk;
    }

    if (type == "mms_verify") {
        const std::string case_name = ini.get_string("mms_verify.case", "decaying_cosine");
        const std::string scheme_str = ini.get_string("mms_verify.scheme", "imex_be");
        const long n = ini.get_long("mms_verify.points_per_axis", 32);
        const double t_end = ini.get_double("mms_verify.t_end", 0.5);
        const auto dt_list = ini.get_double_list("mms_verify.dt_list", {});
        if (dt_list.empty()) throw validation_error("mms_verify.dt_list", "required");
        Scheme scheme;
        if (scheme_str == "imex_be")
            scheme = Scheme::ImexBE;
        else if (scheme_str == "imex_bdf2")
            scheme = Scheme::ImexBDF2;
        else
            throw validation_error("mms_verify.scheme", "expected imex_be or imex_bdf2");
        ini.reject_unused();
        const MmsResult r = mms_verify(mms_case(case_name), static_cast<int>(n), scheme,
                                       dt_list, t_end, out_root);
        for (std::size_t i = 0; i < r.dts.size(); ++i)
            std::cout << "dt = " << r.dts[i] << ": error " << r.errors[i] << "\n";
        std::cout << "slope: " << r.slope << "\n";
        return kExitOk;
    }

    if (type == "gronwall_fit") {
        const RunConfig base = load_base();
        const auto amplitudes = ini.get_double_list("gronwall_fit.amplitudes", {});
        const double holdout = ini.get_double("gronwall_fit.holdout_amplitude", 0.0);
        if (amplitudes.size() < 2)
            throw validation_error("gronwall_fit.amplitudes", "need at least two runs");
        if (!(holdout > 0.0))
            throw validation_error("gronwall_fit.holdout_amplitude", "required and positive");
        ini.reject_unused();

        std::vector<std::vector<DiagnosticsRecord>> ensemble(amplitudes.size());
        std::vector<double> all_amps(amplitudes.begin(), amplitudes.end());
        all_amps.push_back(holdout);
        std::vector<std::vector<DiagnosticsRecord>> streams(all_amps.size());
        for (std::size_t i = 0; i < all_amps.size(); ++i) {
            RunConfig cfg = base;
            cfg.initial.amplitude = all_amps[i];
            const char* label = i + 1 == all_amps.size() ? "holdout" : "train";
            char name[48];
            std::snprintf(name, sizeof(name), "%s_%02zu", label, i + 1);
            const RunResult res = execute_run(cfg, out_root / name, strict);
            if (res.exit_code != kExitOk) return res.exit_code;
            streams[i] = res.records;
        }
        for (std::size_t i = 0; i + 1 < streams.size(); ++i) ensemble[i] = streams[i];
        const GronwallFit fit = fit_gronwall_constants(ensemble, base.model.beta);
        const double margin =
            gronwall_envelope(streams.back(), fit.c1, fit.c3, base.model.beta);
        std::ofstream csv(out_root / "gronwall.csv", std::ios::trunc);
        char buf[200];
        csv << "c1,c3,fit_residual,holdout_margin\n";
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", fit.c1, fit.c3,
                      fit.fit_residual, margin);
        csv << buf;
        std::cout << "c1 = " << fit.c1 << ", c3 = " << fit.c3 << ", holdout margin = "
                  << margin << "\n";
        return kExitOk;
    }

    throw validation_error("experiment.type", "unknown experiment type `" + type + "`");
}

} // namespace
} // namespace cch
