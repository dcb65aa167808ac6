#pragma once

#include <functional>
#include <vector>

#include "cch/fields.hpp"
#include "cch/model.hpp"

namespace cch {

enum class Scheme { ImexBE, ImexBDF2 };

/// Time-stepping knobs. Stepping is adaptive (step-doubling error control)
/// exactly when dt_min < dt_max; equal bounds pin the step.
struct StepperConfig {
    Scheme scheme = Scheme::ImexBE;
    double stabilization = 1.0; // floor for the per-step hyperdiffusion coefficient A
    double dt_min = 1e-9;
    double dt_max = 1e-2;
    double safety = 0.9;
    double error_tol = 1e-6;

    void validate() const;
    bool operator==(const StepperConfig&) const = default;
};

/// Trajectory point. dt is the controller's current step proposal. The two
/// history fields feed the two-step scheme and are absent until the first
/// step has run (has_history == false).
struct SolverState {
    double t = 0.0;
    SpectralField u;
    double dt = 0.0;
    long step_count = 0;

    bool has_history = false;
    SpectralField u_prev; // state at t - dt_prev
    double dt_prev = 0.0;
};

/// Optional forcing: returns source coefficients on the solver grid at a
/// given time (used by manufactured-solution runs).
using SourceFn = std::function<SpectralField(double)>;

/// Spectral projection of the initial samples at the given cutoff; t = 0,
/// dt left at 0 (run() fills in a default if the caller does not).
SolverState initial_state(const PhysicalField& u0, int cutoff);

/// Heuristic initial step 0.1 dx^2 / (gamma A), clamped to [dt_min, dt_max];
/// A is the stabilization floor raised to the grid maximum of M_theta(u0).
double default_dt(const SpectralField& u0, const ModelParams& p, const StepperConfig& c);

/// One step of the stabilized IMEX scheme at state.dt: the constant-
/// coefficient hyperdiffusion gamma A lap^2 u is implicit (diagonal per-mode
/// division), everything else explicit; A = max(stabilization, max_grid
/// M_theta(u)). The update is evaluated in difference form, so constant
/// states and the mean mode are exact fixed points of the arithmetic, not
/// just of the analysis. The first step of the two-step scheme falls back to
/// the one-step scheme. Result stays dealiased if the input was.
/// Raises blowup_error on |u|_max > 1e6 or non-finite values.
SolverState step(const SolverState& state, const ModelParams& p, const StepperConfig& c,
                 const SourceFn& source = {});

/// Step-size controller: clamp(safety * dt * (error_tol/err)^(1/(p+1))) with
/// p the scheme order. err = 0 proposes dt_max; non-finite err proposes
/// dt_min (callers should surface a warning).
double adapt_dt(const SolverState& state, double error_estimate, const StepperConfig& c);

struct RunCallbacks {
    std::function<void(const SolverState&)> on_accept;       // every accepted step
    std::function<void(const SolverState&)> on_hit;          // at each requested hit time
    std::function<void(const std::string&)> on_warning;
};

/// Advance to t_end, landing exactly on every hit time and on t_end (the
/// final step is shortened, never extended). hit_times must be sorted,
/// unique, and inside [state.t, t_end]; entries equal to state.t are
/// skipped (the caller already owns that instant). With dt_min < dt_max the
/// controller runs step-doubling: a step is accepted when the coarse/fine
/// discrepancy is within error_tol, and the fine result (two half steps) is
/// what enters the trajectory. T_end == state.t returns the state untouched.
SolverState run(SolverState state, const ModelParams& p, const StepperConfig& c, double t_end,
                const std::vector<double>& hit_times = {}, const RunCallbacks& callbacks = {},
                const SourceFn& source = {});

} // namespace cch
