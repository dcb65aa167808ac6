#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cch/config.hpp"
#include "cch/diagnostics.hpp"
#include "cch/driver.hpp"

namespace cch {

/// Outcome of a run ensemble over a nonincreasing sequence of regularization
/// parameters theta_1 >= theta_2 >= ... > 0 (ties are allowed and simply
/// reproduce the same trajectory). pairwise_l2[i] is the space-time L2
/// distance between consecutive runs, trapezoid-in-time over the shared
/// snapshot instants.
struct ContinuationResult {
    std::vector<double> thetas;
    std::vector<double> pairwise_l2;
    std::vector<std::filesystem::path> run_dirs;
    std::vector<std::vector<std::pair<double, double>>> degeneracy_traces; // (t, measure)
    std::vector<bool> failed; // per-run blow-up marker
};

ContinuationResult theta_continuation(const RunConfig& base, std::span<const double> thetas,
                                      const std::filesystem::path& out_root, int jobs = 1);

/// Self-convergence study: the base config rerun at each grid size, errors
/// measured against the finest run at the shared snapshot instants
/// (mode-matched cross-resolution L2).
struct RefinementResult {
    std::vector<int> n_values;
    // Errors vs the finest run (finest entry = 0); empty when only one grid ran.
    std::vector<double> error_at_end; // at t_end
    std::vector<double> error_max;    // max over snapshot instants
    std::vector<std::filesystem::path> run_dirs;
};

RefinementResult n_refinement(const RunConfig& base, std::span<const int> n_list,
                              const std::filesystem::path& out_root, int jobs = 1);

/// Manufactured-solution case: a closed-form exact solution from a fixed
/// catalog together with the model parameters it is designed for. The
/// source term is never written down analytically; it is assembled as
/// f(t) = du*/dt - rhs(u*(t)) with the solver's own spectral operators, so
/// forced runs isolate the time discretization error.
struct MmsCase {
    std::string name;
    ModelParams params;
    // u*(t) and du*/dt as spectral fields on a given domain.
    SpectralField exact(const DomainSpec& d, double t) const;
    SpectralField exact_dt(const DomainSpec& d, double t) const;
    SourceFn source(const DomainSpec& d) const;
};

/// Catalog lookup ("decaying_cosine", "stationary", "zero_crossing").
MmsCase mms_case(const std::string& name);

struct MmsResult {
    std::vector<double> dts;
    std::vector<double> errors; // L2 at t_end against the projected exact solution
    double slope = 0.0;         // least-squares log-log slope; 0 if < 2 entries
};

MmsResult mms_verify(const MmsCase& mms, int points_per_axis, Scheme scheme,
                     std::span<const double> dt_list, double t_end,
                     const std::filesystem::path& out_dir);

/// Empirical envelope constants from an ensemble of diagnostics streams:
/// C1 from the worst exponential growth rate of E(t) (least squares on
/// log(E + shift)), C3 with headroom so the fitted ensemble sits inside the
/// envelope. beta is the drift shared by the ensemble.
struct GronwallFit {
    double c1 = 0.0;
    double c3 = 0.0;
    double fit_residual = 0.0;
    bool degenerate = false; // flat-energy ensemble; c1 forced to 0
};

GronwallFit fit_gronwall_constants(const std::vector<std::vector<DiagnosticsRecord>>& ensemble,
                                   std::span<const double> beta);

} // namespace cch
