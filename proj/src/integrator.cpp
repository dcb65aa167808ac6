#include "cch/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cch/spectral.hpp"

namespace cch {
namespace {

constexpr double kBlowupThreshold = 1e6;
constexpr int kMaxRejections = 40;

int scheme_order(Scheme s) {
    return s == Scheme::ImexBE ? 1 : 2;
}

double stabilization_coefficient(const PhysicalField& u_phys, const ModelParams& p,
                                 const StepperConfig& c) {
    double a = c.stabilization;
    for (double v : u_phys.values) a = std::max(a, mobility_effective(v, p));
    return a;
}

void check_state_regular(const PhysicalField& u_phys, double t) {
    for (double v : u_phys.values) {
        if (!std::isfinite(v))
            throw blowup_error("non-finite state at t = " + std::to_string(t));
        if (std::abs(v) > kBlowupThreshold)
            throw blowup_error("|u| exceeded " + std::to_string(kBlowupThreshold) +
                               " at t = " + std::to_string(t));
    }
}

SpectralField explicit_part(const SpectralField& u, double t, const ModelParams& p,
                            const SourceFn& source) {
    SpectralField g = rhs(u, p);
    if (source) {
        const SpectralField f = source(t);
        if (!(f.domain == u.domain))
            throw std::invalid_argument("source field lives on a different domain");
        for (std::size_t i = 0; i < g.coeffs.size(); ++i) g.coeffs[i] += f.coeffs[i];
    }
    return g;
}

/// One step of size dt from `state`. The update is written as
/// u_next = u + (increment)/(denominator) where the increment vanishes
/// identically (as floating-point zeros) for stationary data, which makes
/// constant states and the unforced mean mode bit-exact fixed points.
SolverState advance(const SolverState& state, const ModelParams& p, const StepperConfig& c,
                    double dt, const SourceFn& source) {
    const PhysicalField u_phys = spectral::inverse(state.u);
    check_state_regular(u_phys, state.t);
    const double a = stabilization_coefficient(u_phys, p, c);
    const double ga = p.gamma * a;

    const SpectralField g = explicit_part(state.u, state.t, p, source);

    SolverState out;
    out.u = SpectralField(state.u.domain);
    const bool two_step = c.scheme == Scheme::ImexBDF2 && state.has_history;

    if (!two_step) {
        for_each_mode(state.u.domain, [&](std::size_t i, int kx, int ky) {
            const double k2 = static_cast<double>(kx) * kx + static_cast<double>(ky) * ky;
            const double denom = 1.0 + dt * ga * (k2 * k2);
            out.u.coeffs[i] = state.u.coeffs[i] + dt * g.coeffs[i] / denom;
        });
    } else {
        const double r = dt / state.dt_prev;
        const double alpha = (1.0 + 2.0 * r) / (1.0 + r);
        const double w2 = r * r / (1.0 + r);
        const SpectralField g_prev =
            explicit_part(state.u_prev, state.t - state.dt_prev, p, source);
        for_each_mode(state.u.domain, [&](std::size_t i, int kx, int ky) {
            const double k2 = static_cast<double>(kx) * kx + static_cast<double>(ky) * ky;
            const double k4 = k2 * k2;
            const std::complex<double> delta = state.u.coeffs[i] - state.u_prev.coeffs[i];
            const std::complex<double> increment =
                (w2 + dt * ga * k4 * r) * delta +
                dt * ((1.0 + r) * g.coeffs[i] - r * g_prev.coeffs[i]);
            out.u.coeffs[i] = state.u.coeffs[i] + increment / (alpha + dt * ga * k4);
        });
    }

    for (const auto& cc : out.u.coeffs)
        if (!std::isfinite(cc.real()) || !std::isfinite(cc.imag()))
            throw blowup_error("non-finite coefficient produced at t = " +
                               std::to_string(state.t));

    out.t = state.t + dt;
    out.dt = state.dt;
    out.step_count = state.step_count + 1;
    out.has_history = true;
    out.u_prev = state.u;
    out.dt_prev = dt;
    return out;
}

} // namespace

void StepperConfig::validate() const {
    if (!(stabilization > 0.0) || !std::isfinite(stabilization))
        throw validation_error("stepper.stabilization", "must be positive and finite");
    if (!(dt_min > 0.0) || !std::isfinite(dt_min))
        throw validation_error("stepper.dt_min", "must be positive and finite");
    if (!(dt_max >= dt_min) || !std::isfinite(dt_max))
        throw validation_error("stepper.dt_max", "must be finite and >= dt_min");
    if (!(safety > 0.0) || !(safety <= 1.0))
        throw validation_error("stepper.safety", "must lie in (0, 1]");
    if (!(error_tol > 0.0) || !std::isfinite(error_tol))
        throw validation_error("stepper.error_tol", "must be positive and finite");
}

SolverState initial_state(const PhysicalField& u0, int cutoff) {
    SolverState s;
    s.u = spectral::project(spectral::forward(u0), cutoff);
    s.t = 0.0;
    s.dt = 0.0;
    s.step_count = 0;
    return s;
}

double default_dt(const SpectralField& u0, const ModelParams& p, const StepperConfig& c) {
    const PhysicalField u_phys = spectral::inverse(u0);
    double a = c.stabilization;
    for (double v : u_phys.values) a = std::max(a, mobility_effective(v, p));
    const double dx = u0.domain.grid_spacing();
    const double dt = 0.1 * dx * dx / (p.gamma * a);
    return std::clamp(dt, c.dt_min, c.dt_max);
}

SolverState step(const SolverState& state, const ModelParams& p, const StepperConfig& c,
                 const SourceFn& source) {
    c.validate();
    if (!(state.dt > 0.0)) throw std::invalid_argument("step requires state.dt > 0");
    return advance(state, p, c, state.dt, source);
}

double adapt_dt(const SolverState& state, double error_estimate, const StepperConfig& c) {
    if (!std::isfinite(error_estimate)) return c.dt_min;
    if (error_estimate == 0.0) return c.dt_max;
    const double exponent = 1.0 / (scheme_order(c.scheme) + 1.0);
    const double factor = std::pow(c.error_tol / error_estimate, exponent);
    return std::clamp(c.safety * state.dt * factor, c.dt_min, c.dt_max);
}

SolverState run(SolverState state, const ModelParams& p, const StepperConfig& c, double t_end,
                const std::vector<double>& hit_times, const RunCallbacks& callbacks,
                const SourceFn& source) {
    c.validate();
    if (!(t_end >= state.t)) throw std::invalid_argument("t_end must be >= state.t");
    if (state.dt <= 0.0) state.dt = default_dt(state.u, p, c);

    std::vector<double> agenda;
    for (double h : hit_times) {
        if (h < state.t || h > t_end)
            throw std::invalid_argument("hit time outside [state.t, t_end]");
        if (!agenda.empty() && h <= agenda.back())
            throw std::invalid_argument("hit times must be sorted and unique");
        agenda.push_back(h);
    }
    std::vector<bool> is_hit(agenda.size(), true);
    if (agenda.empty() || agenda.back() < t_end) {
        agenda.push_back(t_end);
        is_hit.push_back(false);
    }

    const bool adaptive = c.dt_min < c.dt_max;

    for (std::size_t ai = 0; ai < agenda.size(); ++ai) {
        const double target = agenda[ai];
        if (target == state.t) {
            // An initial-instant hit belongs to the caller; nothing to do.
            continue;
        }
        while (state.t < target) {
            double dt_eff = state.dt;
            bool landing = (target - state.t) <= dt_eff * (1.0 + 1e-12);
            if (landing) dt_eff = target - state.t;

            int rejections = 0;
            for (;;) {
                if (!adaptive) {
                    state = advance(state, p, c, dt_eff, source);
                    break;
                }
                SolverState half = advance(state, p, c, 0.5 * dt_eff, source);
                half.dt = dt_eff; // keep the controller value out of the estimate
                SolverState fine = advance(half, p, c, 0.5 * dt_eff, source);
                const SolverState coarse = advance(state, p, c, dt_eff, source);
                const double err = spectral::l2_distance(coarse.u, fine.u) /
                                   (1.0 + spectral::l2_norm(fine.u));
                if (!std::isfinite(err)) {
                    if (callbacks.on_warning)
                        callbacks.on_warning("non-finite step error estimate at t = " +
                                             std::to_string(state.t) + "; forcing dt_min");
                    state.dt = c.dt_min;
                    dt_eff = std::min(c.dt_min, target - state.t);
                    if (++rejections > kMaxRejections)
                        throw blowup_error("step error estimate stayed non-finite at dt_min");
                    continue;
                }
                const double dt_proposal =
                    [&] {
                        SolverState probe = state;
                        probe.dt = dt_eff;
                        return adapt_dt(probe, err, c);
                    }();
                if (err > c.error_tol && dt_eff > c.dt_min * (1.0 + 1e-12) &&
                    rejections < kMaxRejections) {
                    ++rejections;
                    dt_eff = std::min(dt_proposal, target - state.t);
                    landing = dt_eff == target - state.t;
                    continue;
                }
                if (err > c.error_tol && callbacks.on_warning)
                    callbacks.on_warning("accepting step above error_tol at dt_min, t = " +
                                         std::to_string(state.t));
                fine.step_count = state.step_count + 1; // one accepted step
                state = std::move(fine);
                state.dt = dt_proposal;
                break;
            }

            if (landing)
                state.t = target; // land exactly; the increment summed to target anyway
            if (callbacks.on_accept) callbacks.on_accept(state);
        }
        if (is_hit[ai] && callbacks.on_hit) callbacks.on_hit(state);
    }
    return state;
}

} // namespace cch
