#include "cch/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "cch/ini.hpp"
#include "cch/snapshot.hpp"
#include "cch/spectral.hpp"

namespace cch {
namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += fmt(v[i]);
    }
    return out;
}

std::string fmt_list(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(v[i]);
    }
    return out;
}

const char* kind_name(InitialCondition::Kind k) {
    switch (k) {
        case InitialCondition::Kind::Constant: return "constant";
        case InitialCondition::Kind::SingleMode: return "single_mode";
        case InitialCondition::Kind::RandomSmooth: return "random_smooth";
        case InitialCondition::Kind::File: return "file";
    }
    return "?";
}

const char* scheme_name(Scheme s) {
    return s == Scheme::ImexBE ? "imex_be" : "imex_bdf2";
}

const char* source_bound_name(SourceBoundMode m) {
    switch (m) {
        case SourceBoundMode::Auto: return "auto";
        case SourceBoundMode::On: return "on";
        case SourceBoundMode::Off: return "off";
    }
    return "?";
}

/// Raw 64-bit generator output mapped to [0, 1): the top 53 bits scaled by
/// 2^-53. Documented in docs/formats.md; never replaced by a library
/// distribution so the mapping stays pinned across standard libraries.
double u64_to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

} // namespace

std::vector<double> RunSettings::resolved_snapshot_times() const {
    if (!snapshot_times.empty()) return snapshot_times;
    std::vector<double> out;
    if (snapshot_count <= 0) return out;
    if (snapshot_count == 1) return {t_end};
    out.reserve(snapshot_count);
    for (int i = 0; i < snapshot_count; ++i) {
        if (i == 0)
            out.push_back(0.0);
        else if (i == snapshot_count - 1)
            out.push_back(t_end);
        else
            out.push_back(t_end * static_cast<double>(i) /
                          static_cast<double>(snapshot_count - 1));
    }
    return out;
}

void RunConfig::validate() const {
    domain.validate();
    model.validate(domain.dimension);
    stepper.validate();

    switch (initial.kind) {
        case InitialCondition::Kind::Constant:
            if (!std::isfinite(initial.value))
                throw validation_error("initial.value", "must be finite");
            break;
        case InitialCondition::Kind::SingleMode: {
            if (static_cast<int>(initial.wavevector.size()) != domain.dimension)
                throw validation_error("initial.wavevector",
                                       "needs one integer per space dimension");
            bool all_zero = true;
            for (int w : initial.wavevector) {
                if (std::abs(w) > domain.nyquist())
                    throw validation_error("initial.wavevector",
                                           "component beyond the Nyquist index");
                if (w != 0) all_zero = false;
            }
            if (all_zero)
                throw validation_error("initial.wavevector",
                                       "must be nonzero (use kind = constant)");
            if (!std::isfinite(initial.amplitude) || !std::isfinite(initial.mean))
                throw validation_error("initial.amplitude", "must be finite");
            break;
        }
        case InitialCondition::Kind::RandomSmooth:
            if (!std::isfinite(initial.amplitude) || !std::isfinite(initial.mean))
                throw validation_error("initial.amplitude", "must be finite");
            if (!(initial.decay >= 0.0) || !std::isfinite(initial.decay))
                throw validation_error("initial.decay", "must be finite and >= 0");
            if (initial.band_limit < 0)
                throw validation_error("initial.band_limit", "must be >= 0");
            break;
        case InitialCondition::Kind::File:
            if (initial.path.empty())
                throw validation_error("initial.path", "required for kind = file");
            break;
    }

    if (!(run.t_end > 0.0) || !std::isfinite(run.t_end))
        throw validation_error("run.t_end", "must be positive and finite");
    if (run.snapshot_count < 0)
        throw validation_error("run.snapshot_count", "must be >= 0");
    for (std::size_t i = 0; i < run.snapshot_times.size(); ++i) {
        const double t = run.snapshot_times[i];
        if (!(t >= 0.0) || !(t <= run.t_end))
            throw validation_error("run.snapshot_times", "instants must lie in [0, t_end]");
        if (i > 0 && !(t > run.snapshot_times[i - 1]))
            throw validation_error("run.snapshot_times", "instants must increase strictly");
    }
    if (run.output_dir.empty())
        throw validation_error("run.output_dir", "must not be empty");

    if (!(diagnostics.eps_deg > 0.0))
        throw validation_error("diagnostics.eps_deg", "must be positive");
    if (!(diagnostics.tol_ineq > 0.0))
        throw validation_error("diagnostics.tol_ineq", "must be positive");
    if (diagnostics.record_every < 1)
        throw validation_error("diagnostics.record_every", "must be >= 1");
    if (diagnostics.source_bound == SourceBoundMode::On && !(model.theta > 0.0))
        throw validation_error("diagnostics.source_bound",
                               "incompatible with theta = 0 (denominator has no lower bound)");
}

RunConfig parse_config(const std::string& text) {
    IniFile ini = IniFile::parse(text);
    RunConfig c;

    c.domain.dimension = static_cast<int>(ini.get_long("domain.dimension", c.domain.dimension));
    c.domain.points_per_axis =
        static_cast<int>(ini.get_long("domain.points_per_axis", c.domain.points_per_axis));
    ini.get_rational("domain.dealias_fraction", c.domain.dealias_fraction.num,
                     c.domain.dealias_fraction.den);

    c.model.gamma = ini.get_double("model.gamma", c.model.gamma);
    c.model.m = ini.get_double("model.m", c.model.m);
    c.model.beta = ini.get_double_list(
        "model.beta", std::vector<double>(static_cast<std::size_t>(
                                              std::max(1, c.domain.dimension)),
                                          0.0));
    c.model.phi_coeffs = ini.get_double_list("model.phi_coeffs", c.model.phi_coeffs);
    c.model.psi_coeffs = ini.get_double_list("model.psi_coeffs", c.model.psi_coeffs);
    c.model.theta = ini.get_double("model.theta", c.model.theta);
    c.model.signed_power = ini.get_bool("model.signed_power", c.model.signed_power);

    const std::string scheme = ini.get_string("stepper.scheme", scheme_name(c.stepper.scheme));
    if (scheme == "imex_be")
        c.stepper.scheme = Scheme::ImexBE;
    else if (scheme == "imex_bdf2")
        c.stepper.scheme = Scheme::ImexBDF2;
    else
        throw validation_error("stepper.scheme", "expected imex_be or imex_bdf2, got `" +
                                                     scheme + "`");
    c.stepper.stabilization = ini.get_double("stepper.stabilization", c.stepper.stabilization);
    c.stepper.dt_min = ini.get_double("stepper.dt_min", c.stepper.dt_min);
    c.stepper.dt_max = ini.get_double("stepper.dt_max", c.stepper.dt_max);
    c.stepper.safety = ini.get_double("stepper.safety", c.stepper.safety);
    c.stepper.error_tol = ini.get_double("stepper.error_tol", c.stepper.error_tol);

    const std::string kind = ini.get_string("initial.kind", kind_name(c.initial.kind));
    if (kind == "constant")
        c.initial.kind = InitialCondition::Kind::Constant;
    else if (kind == "single_mode")
        c.initial.kind = InitialCondition::Kind::SingleMode;
    else if (kind == "random_smooth")
        c.initial.kind = InitialCondition::Kind::RandomSmooth;
    else if (kind == "file")
        c.initial.kind = InitialCondition::Kind::File;
    else
        throw validation_error("initial.kind",
                               "expected constant, single_mode, random_smooth or file");
    c.initial.value = ini.get_double("initial.value", c.initial.value);
    c.initial.amplitude = ini.get_double("initial.amplitude", c.initial.amplitude);
    c.initial.wavevector = ini.get_int_list(
        "initial.wavevector",
        c.initial.kind == InitialCondition::Kind::SingleMode
            ? std::vector<int>(static_cast<std::size_t>(std::max(1, c.domain.dimension)), 1)
            : c.initial.wavevector);
    c.initial.mean = ini.get_double("initial.mean", c.initial.mean);
    c.initial.seed = ini.get_u64("initial.seed", c.initial.seed);
    c.initial.decay = ini.get_double("initial.decay", c.initial.decay);
    c.initial.band_limit =
        static_cast<int>(ini.get_long("initial.band_limit", c.initial.band_limit));
    c.initial.path = ini.get_string("initial.path", c.initial.path);

    c.run.t_end = ini.get_double("run.t_end", c.run.t_end);
    c.run.snapshot_count =
        static_cast<int>(ini.get_long("run.snapshot_count", c.run.snapshot_count));
    c.run.snapshot_times = ini.get_double_list("run.snapshot_times", c.run.snapshot_times);
    c.run.output_dir = ini.get_string("run.output_dir", c.run.output_dir);

    c.diagnostics.eps_deg = ini.get_double("diagnostics.eps_deg", c.diagnostics.eps_deg);
    c.diagnostics.tol_ineq = ini.get_double("diagnostics.tol_ineq", c.diagnostics.tol_ineq);
    c.diagnostics.strict = ini.get_bool("diagnostics.strict", c.diagnostics.strict);
    const std::string sb = ini.get_string("diagnostics.source_bound",
                                          source_bound_name(c.diagnostics.source_bound));
    if (sb == "auto")
        c.diagnostics.source_bound = SourceBoundMode::Auto;
    else if (sb == "on")
        c.diagnostics.source_bound = SourceBoundMode::On;
    else if (sb == "off")
        c.diagnostics.source_bound = SourceBoundMode::Off;
    else
        throw validation_error("diagnostics.source_bound", "expected auto, on or off");
    c.diagnostics.record_every =
        static_cast<int>(ini.get_long("diagnostics.record_every", c.diagnostics.record_every));

    ini.reject_unused();
    c.validate();
    return c;
}

RunConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config: " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    RunConfig c = parse_config(ss.str());
    if (c.initial.kind == InitialCondition::Kind::File) {
        std::filesystem::path p = c.initial.path;
        if (p.is_relative()) c.initial.path = (path.parent_path() / p).string();
    }
    return c;
}

std::string serialize_config(const RunConfig& c) {
    std::string out;
    out += "[domain]\n";
    out += "dimension = " + std::to_string(c.domain.dimension) + "\n";
    out += "points_per_axis = " + std::to_string(c.domain.points_per_axis) + "\n";
    out += "dealias_fraction = " + std::to_string(c.domain.dealias_fraction.num) + "/" +
           std::to_string(c.domain.dealias_fraction.den) + "\n";

    out += "\n[model]\n";
    out += "gamma = " + fmt(c.model.gamma) + "\n";
    out += "m = " + fmt(c.model.m) + "\n";
    out += "beta = " + fmt_list(c.model.beta) + "\n";
    out += "phi_coeffs = " + fmt_list(c.model.phi_coeffs) + "\n";
    out += "psi_coeffs = " + fmt_list(c.model.psi_coeffs) + "\n";
    out += "theta = " + fmt(c.model.theta) + "\n";
    out += std::string("signed_power = ") + (c.model.signed_power ? "true" : "false") + "\n";

    out += "\n[stepper]\n";
    out += std::string("scheme = ") + scheme_name(c.stepper.scheme) + "\n";
    out += "stabilization = " + fmt(c.stepper.stabilization) + "\n";
    out += "dt_min = " + fmt(c.stepper.dt_min) + "\n";
    out += "dt_max = " + fmt(c.stepper.dt_max) + "\n";
    out += "safety = " + fmt(c.stepper.safety) + "\n";
    out += "error_tol = " + fmt(c.stepper.error_tol) + "\n";

    out += "\n[initial]\n";
    out += std::string("kind = ") + kind_name(c.initial.kind) + "\n";
    switch (c.initial.kind) {
        case InitialCondition::Kind::Constant:
            out += "value = " + fmt(c.initial.value) + "\n";
            break;
        case InitialCondition::Kind::SingleMode:
            out += "amplitude = " + fmt(c.initial.amplitude) + "\n";
            out += "wavevector = " + fmt_list(c.initial.wavevector) + "\n";
            out += "mean = " + fmt(c.initial.mean) + "\n";
            break;
        case InitialCondition::Kind::RandomSmooth:
            out += "amplitude = " + fmt(c.initial.amplitude) + "\n";
            out += "mean = " + fmt(c.initial.mean) + "\n";
            out += "seed = " + std::to_string(c.initial.seed) + "\n";
            out += "decay = " + fmt(c.initial.decay) + "\n";
            out += "band_limit = " + std::to_string(c.initial.band_limit) + "\n";
            break;
        case InitialCondition::Kind::File:
            out += "path = " + c.initial.path + "\n";
            break;
    }

    out += "\n[run]\n";
    out += "t_end = " + fmt(c.run.t_end) + "\n";
    if (!c.run.snapshot_times.empty())
        out += "snapshot_times = " + fmt_list(c.run.snapshot_times) + "\n";
    else
        out += "snapshot_count = " + std::to_string(c.run.snapshot_count) + "\n";
    out += "output_dir = " + c.run.output_dir + "\n";

    out += "\n[diagnostics]\n";
    out += "eps_deg = " + fmt(c.diagnostics.eps_deg) + "\n";
    out += "tol_ineq = " + fmt(c.diagnostics.tol_ineq) + "\n";
    out += std::string("strict = ") + (c.diagnostics.strict ? "true" : "false") + "\n";
    out += std::string("source_bound = ") + source_bound_name(c.diagnostics.source_bound) + "\n";
    out += "record_every = " + std::to_string(c.diagnostics.record_every) + "\n";
    return out;
}

SpectralField build_initial_field(const InitialCondition& ic, const DomainSpec& domain) {
    domain.validate();
    SpectralField f(domain);
    switch (ic.kind) {
        case InitialCondition::Kind::Constant:
            f.coeffs[0] = ic.value;
            return f;
        case InitialCondition::Kind::SingleMode: {
            // mean + amplitude * cos(w . x), built directly in coefficient
            // space so it is exact.
            f.coeffs[0] = ic.mean;
            const int kx = ic.wavevector[0];
            const int ky = domain.dimension == 2 ? ic.wavevector[1] : 0;
            f.coeffs[mode_index(domain, kx, ky)] += 0.5 * ic.amplitude;
            f.coeffs[mode_index(domain, -kx, -ky)] += 0.5 * ic.amplitude;
            return f;
        }
        case InitialCondition::Kind::RandomSmooth: {
            // One coefficient per half-space mode, visited in a fixed
            // documented order; two generator draws per mode (magnitude,
            // then phase). The conjugate mode mirrors the draw.
            std::mt19937_64 rng(ic.seed);
            int band = domain.dealias_cutoff();
            if (ic.band_limit > 0) band = std::min(band, ic.band_limit);
            f.coeffs[0] = ic.mean;
            auto place = [&](int kx, int ky) {
                const double r_mag = u64_to_unit(rng());
                const double r_phase = u64_to_unit(rng());
                const double k_abs = std::sqrt(static_cast<double>(kx) * kx +
                                               static_cast<double>(ky) * ky);
                const double mag = ic.amplitude * std::exp(-ic.decay * k_abs) * r_mag;
                const double ph = 2.0 * std::numbers::pi * r_phase;
                const std::complex<double> cval(mag * std::cos(ph), mag * std::sin(ph));
                f.coeffs[mode_index(domain, kx, ky)] = cval;
                f.coeffs[mode_index(domain, -kx, -ky)] = std::conj(cval);
            };
            if (domain.dimension == 1) {
                for (int kx = 1; kx <= band; ++kx) place(kx, 0);
            } else {
                for (int ky = 1; ky <= band; ++ky) place(0, ky);
                for (int kx = 1; kx <= band; ++kx)
                    for (int ky = -band; ky <= band; ++ky) place(kx, ky);
            }
            return f;
        }
        case InitialCondition::Kind::File: {
            const Snapshot snap = load_snapshot(ic.path);
            if (snap.field.domain.dimension != domain.dimension ||
                snap.field.domain.points_per_axis != domain.points_per_axis)
                throw validation_error("initial.path",
                                       "snapshot grid does not match the configured domain");
            return spectral::forward(snap.field);
        }
    }
    throw std::logic_error("unreachable initial-condition kind");
}

} // namespace cch
