#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cch/fields.hpp"
#include "cch/integrator.hpp"
#include "cch/model.hpp"

namespace cch {

/// Initial-condition descriptor. Everything is deterministic: the
/// random-smooth kind derives all coefficients from one 64-bit seed through
/// a documented generator (see docs/formats.md).
struct InitialCondition {
    enum class Kind { Constant, SingleMode, RandomSmooth, File };

    Kind kind = Kind::Constant;
    double value = 0.0;          // constant level
    double amplitude = 0.1;      // single_mode: cosine amplitude; random_smooth: scale
    std::vector<int> wavevector; // single_mode: one integer per dimension
    double mean = 0.0;           // single_mode / random_smooth offset
    std::uint64_t seed = 1;      // random_smooth
    double decay = 1.0;          // random_smooth spectral decay rate
    int band_limit = 0;          // random_smooth: highest |xi|_inf; 0 = dealias cutoff
    std::string path;            // file: snapshot to load

    bool operator==(const InitialCondition&) const = default;
};

enum class SourceBoundMode { Auto, On, Off };

struct DiagnosticsConfig {
    double eps_deg = 1e-3;
    double tol_ineq = 1e-3;
    bool strict = false;
    SourceBoundMode source_bound = SourceBoundMode::Auto; // Auto: on iff theta > 0
    int record_every = 1;

    bool source_bound_enabled(double theta) const {
        if (source_bound == SourceBoundMode::On) return true;
        if (source_bound == SourceBoundMode::Off) return false;
        return theta > 0.0;
    }
    bool operator==(const DiagnosticsConfig&) const = default;
};

struct RunSettings {
    double t_end = 1.0;
    int snapshot_count = 50;            // used when snapshot_times is empty
    std::vector<double> snapshot_times; // explicit instants, sorted, within [0, t_end]
    std::string output_dir = "out";

    /// The instants snapshots are taken at: the explicit list if given,
    /// otherwise snapshot_count points spread evenly over [0, t_end].
    std::vector<double> resolved_snapshot_times() const;
    bool operator==(const RunSettings&) const = default;
};

struct RunConfig {
    DomainSpec domain;
    ModelParams model;
    StepperConfig stepper;
    InitialCondition initial;
    RunSettings run;
    DiagnosticsConfig diagnostics;

    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

/// Parse the INI-style config grammar (documented in docs/formats.md).
/// Syntax problems raise parse_error with a line number; bad values and
/// unknown keys raise validation_error naming the dotted key path. The
/// result is fully validated.
RunConfig parse_config(const std::string& text);

/// parse_config on a file's contents; a relative [initial] path is resolved
/// against the config file's directory.
RunConfig load_config_file(const std::filesystem::path& path);

/// Canonical text form; parse_config(serialize_config(c)) == c, and
/// serializing again reproduces the identical bytes.
std::string serialize_config(const RunConfig& c);

/// Realize the initial condition as a spectral field on the config domain
/// (not yet projected to the dealias cutoff; the driver does that).
SpectralField build_initial_field(const InitialCondition& ic, const DomainSpec& domain);

} // namespace cch
