#include "cch/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <thread>

#include "cch/snapshot.hpp"
#include "cch/spectral.hpp"

namespace cch {
namespace {

void parallel_for_index(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    jobs = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= count) return;
                    fn(i);
                }
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::string run_dir_name(const char* prefix, std::size_t index) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%02zu", prefix, index);
    return buf;
}

/// Sorted snapshots of a completed run, as spectral fields plus times.
std::vector<Snapshot> load_run_snapshots(const std::filesystem::path& run_dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(run_dir / "snapshots")) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("snap_", 0) == 0) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<Snapshot> snaps;
    snaps.reserve(files.size());
    for (const auto& f : files) snaps.push_back(load_snapshot(f));
    return snaps;
}

std::vector<double> trapezoid_weights(const std::vector<double>& t) {
    std::vector<double> w(t.size(), 0.0);
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
        const double h = 0.5 * (t[j + 1] - t[j]);
        w[j] += h;
        w[j + 1] += h;
    }
    return w;
}

double lsq_slope(std::span<const double> x, std::span<const double> y, double* rms_residual) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    if (rms_residual) {
        double rr = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = (y[i] - my) - slope * (x[i] - mx);
            rr += r * r;
        }
        *rms_residual = std::sqrt(rr / static_cast<double>(n));
    }
    return slope;
}

} // namespace

ContinuationResult theta_continuation(const RunConfig& base, std::span<const double> thetas,
                                      const std::filesystem::path& out_root, int jobs) {
    if (thetas.empty()) throw std::invalid_argument("theta sequence must not be empty");
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        if (!(thetas[i] > 0.0))
            throw std::invalid_argument("theta sequence entries must be positive");
        if (i > 0 && thetas[i] > thetas[i - 1])
            throw std::invalid_argument("theta sequence must be nonincreasing");
    }
    if (base.run.resolved_snapshot_times().size() < 2)
        throw std::invalid_argument("continuation needs at least two snapshot instants");

    ContinuationResult result;
    result.thetas.assign(thetas.begin(), thetas.end());
    result.run_dirs.resize(thetas.size());
    result.failed.assign(thetas.size(), false);
    result.degeneracy_traces.resize(thetas.size());

    std::vector<RunResult> runs(thetas.size());
    parallel_for_index(thetas.size(), jobs, [&](std::size_t i) {
        RunConfig cfg = base;
        cfg.model.theta = thetas[i];
        const std::filesystem::path dir = out_root / run_dir_name("theta", i + 1);
        runs[i] = execute_run(cfg, dir);
        result.run_dirs[i] = dir;
    });

    for (std::size_t i = 0; i < runs.size(); ++i) {
        result.failed[i] = runs[i].blew_up || runs[i].exit_code != kExitOk;
        for (const auto& r : runs[i].records)
            result.degeneracy_traces[i].emplace_back(r.t, r.degeneracy_measure);
    }

    // Pairwise space-time L2 distances over the shared snapshot instants.
    std::vector<std::vector<SpectralField>> fields(runs.size());
    std::vector<std::vector<double>> times(runs.size());
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (result.failed[i]) continue;
        for (const auto& s : load_run_snapshots(result.run_dirs[i])) {
            fields[i].push_back(spectral::forward(s.field));
            times[i].push_back(s.time);
        }
    }
    for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
        if (result.failed[i] || result.failed[i + 1] ||
            fields[i].size() != fields[i + 1].size() || fields[i].size() < 2 ||
            times[i] != times[i + 1]) {
            result.pairwise_l2.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        const std::vector<double> w = trapezoid_weights(times[i]);
        double acc = 0.0;
        for (std::size_t j = 0; j < fields[i].size(); ++j) {
            const double dj = spectral::l2_distance(fields[i][j], fields[i + 1][j]);
            acc += w[j] * dj * dj;
        }
        result.pairwise_l2.push_back(std::sqrt(acc));
    }

    std::filesystem::create_directories(out_root);
    std::ofstream csv(out_root / "continuation.csv", std::ios::trunc);
    csv << "pair,theta_hi,theta_lo,pairwise_l2\n";
    char buf[160];
    for (std::size_t i = 0; i < result.pairwise_l2.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", i + 1, result.thetas[i],
                      result.thetas[i + 1], result.pairwise_l2[i]);
        csv << buf;
    }
    return result;
}

RefinementResult n_refinement(const RunConfig& base, std::span<const int> n_list,
                              const std::filesystem::path& out_root, int jobs) {
    if (n_list.empty()) throw std::invalid_argument("n_list must not be empty");
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1])
            throw std::invalid_argument("n_list must increase strictly");
    if (base.initial.kind == InitialCondition::Kind::File)
        throw std::invalid_argument("refinement needs a grid-independent initial condition");
    if (base.initial.kind == InitialCondition::Kind::RandomSmooth) {
        DomainSpec coarsest = base.domain;
        coarsest.points_per_axis = n_list.front();
        coarsest.validate();
        if (base.initial.band_limit < 1 || base.initial.band_limit > coarsest.dealias_cutoff())
            throw std::invalid_argument(
                "random_smooth refinement needs band_limit within the coarsest dealias cutoff "
                "so every grid sees the same initial function");
    }

    RefinementResult result;
    result.n_values.assign(n_list.begin(), n_list.end());
    result.run_dirs.resize(n_list.size());

    std::vector<RunResult> runs(n_list.size());
    parallel_for_index(n_list.size(), jobs, [&](std::size_t i) {
        RunConfig cfg = base;
        cfg.domain.points_per_axis = n_list[i];
        char name[32];
        std::snprintf(name, sizeof(name), "n_%04d", n_list[i]);
        const std::filesystem::path dir = out_root / name;
        runs[i] = execute_run(cfg, dir);
        result.run_dirs[i] = dir;
        if (runs[i].exit_code != kExitOk)
            throw std::runtime_error("refinement run failed at N = " + std::to_string(n_list[i]));
    });

    std::vector<std::vector<SpectralField>> fields(n_list.size());
    for (std::size_t i = 0; i < n_list.size(); ++i)
        for (const auto& s : load_run_snapshots(result.run_dirs[i]))
            fields[i].push_back(spectral::forward(s.field));

    // A single grid has nothing to compare against: the error table stays empty.
    if (fields.size() > 1) {
        const auto& fine = fields.back();
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i + 1 == fields.size()) {
                result.error_at_end.push_back(0.0);
                result.error_max.push_back(0.0);
                break;
            }
            if (fields[i].size() != fine.size() || fine.empty())
                throw std::runtime_error("refinement runs produced mismatched snapshot sets");
            double worst = 0.0;
            for (std::size_t j = 0; j < fine.size(); ++j)
                worst = std::max(worst, spectral::l2_distance_cross(fields[i][j], fine[j]));
            result.error_max.push_back(worst);
            result.error_at_end.push_back(
                spectral::l2_distance_cross(fields[i].back(), fine.back()));
        }
    }

    std::filesystem::create_directories(out_root);
    std::ofstream csv(out_root / "refinement.csv", std::ios::trunc);
    csv << "n,error_at_end,error_max\n";
    char buf[120];
    for (std::size_t i = 0; i < result.error_at_end.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", result.n_values[i],
                      result.error_at_end[i], result.error_max[i]);
        csv << buf;
    }
    return result;
}

namespace {

/// All catalog entries share the family u*(x,t) = e^{-rate t}(c0 + c1 cos x)
/// so the exact coefficients are two modes, written down without FFTs.
struct MmsShape {
    double c0, c1, rate;
};

MmsShape mms_shape(const std::string& name) {
    if (name == "decaying_cosine") return {0.2, 0.1, 1.0};
    if (name == "stationary") return {0.3, 0.1, 0.0};
    if (name == "zero_crossing") return {0.1, 0.5, 1.0};
    throw std::invalid_argument("unknown manufactured-solution case: " + name);
}

SpectralField mms_field(const DomainSpec& d, const MmsShape& s, double t, bool derivative) {
    SpectralField f(d);
    const double decay = std::exp(-s.rate * t);
    const double factor = derivative ? -s.rate * decay : decay;
    f.coeffs[0] = s.c0 * factor;
    f.coeffs[mode_index(d, 1)] = 0.5 * s.c1 * factor;
    f.coeffs[mode_index(d, -1)] = 0.5 * s.c1 * factor;
    return f;
}

} // namespace

SpectralField MmsCase::exact(const DomainSpec& d, double t) const {
    return mms_field(d, mms_shape(name), t, false);
}

SpectralField MmsCase::exact_dt(const DomainSpec& d, double t) const {
    return mms_field(d, mms_shape(name), t, true);
}

SourceFn MmsCase::source(const DomainSpec& d) const {
    const MmsCase self = *this;
    const DomainSpec dom = d;
    return [self, dom](double t) {
        const SpectralField u_star =
            spectral::project(self.exact(dom, t), dom.dealias_cutoff());
        SpectralField f = self.exact_dt(dom, t);
        const SpectralField r = rhs(u_star, self.params);
        for (std::size_t i = 0; i < f.coeffs.size(); ++i) f.coeffs[i] -= r.coeffs[i];
        return f;
    };
}

MmsCase mms_case(const std::string& name) {
    MmsCase c;
    c.name = name;
    (void)mms_shape(name); // reject unknown names early
    c.params = ModelParams{};
    c.params.gamma = 0.1;
    c.params.m = 1.0;
    c.params.beta = {1.0};
    c.params.phi_coeffs = {-1.0, 0.0, 1.0};
    c.params.psi_coeffs = {0.0, 1.0};
    c.params.theta = name == "zero_crossing" ? 1e-2 : 1e-4;
    return c;
}

MmsResult mms_verify(const MmsCase& mms, int points_per_axis, Scheme scheme,
                     std::span<const double> dt_list, double t_end,
                     const std::filesystem::path& out_dir) {
    if (dt_list.empty()) throw std::invalid_argument("dt_list must not be empty");
    DomainSpec d;
    d.points_per_axis = points_per_axis;
    d.validate();
    mms.params.validate(d.dimension);

    // Case sanity: the forced equation must be satisfied by the exact
    // solution at t = 0 up to roundoff.
    const SourceFn src = mms.source(d);
    {
        const SpectralField u0 = spectral::project(mms.exact(d, 0.0), d.dealias_cutoff());
        SpectralField resid = mms.exact_dt(d, 0.0);
        const SpectralField r = rhs(u0, mms.params);
        const SpectralField f0 = src(0.0);
        for (std::size_t i = 0; i < resid.coeffs.size(); ++i)
            resid.coeffs[i] -= r.coeffs[i] + f0.coeffs[i];
        double worst = 0.0;
        for (const auto& c : resid.coeffs) worst = std::max(worst, std::abs(c));
        if (worst > 1e-10)
            throw std::runtime_error("manufactured case fails its own residual check");
    }

    MmsResult result;
    result.dts.assign(dt_list.begin(), dt_list.end());
    for (double dt : dt_list) {
        if (!(dt > 0.0) || !(dt <= t_end))
            throw std::invalid_argument("dt entries must lie in (0, t_end]");
        StepperConfig sc;
        sc.scheme = scheme;
        sc.dt_min = sc.dt_max = dt; // pinned step: isolates the temporal error
        SolverState state;
        state.u = spectral::project(mms.exact(d, 0.0), d.dealias_cutoff());
        state.dt = dt;
        state = run(state, mms.params, sc, t_end, {}, {}, src);
        const SpectralField u_ref = spectral::project(mms.exact(d, t_end), d.dealias_cutoff());
        result.errors.push_back(spectral::l2_distance(state.u, u_ref));
    }

    if (result.dts.size() >= 2) {
        std::vector<double> lx, ly;
        for (std::size_t i = 0; i < result.dts.size(); ++i) {
            if (result.errors[i] <= 0.0) continue; // exact reproduction: no slope information
            lx.push_back(std::log(result.dts[i]));
            ly.push_back(std::log(result.errors[i]));
        }
        if (lx.size() >= 2) result.slope = lsq_slope(lx, ly, nullptr);
    }

    std::filesystem::create_directories(out_dir);
    std::ofstream csv(out_dir / ("mms_" + mms.name + ".csv"), std::ios::trunc);
    csv << "dt,error\n";
    char buf[100];
    for (std::size_t i = 0; i < result.dts.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", result.dts[i], result.errors[i]);
        csv << buf;
    }
    std::snprintf(buf, sizeof(buf), "# slope = %.17g\n", result.slope);
    csv << buf;
    return result;
}

GronwallFit fit_gronwall_constants(const std::vector<std::vector<DiagnosticsRecord>>& ensemble,
                                   std::span<const double> beta) {
    if (ensemble.empty()) throw std::invalid_argument("ensemble must not be empty");
    for (const auto& records : ensemble)
        if (records.size() < 2)
            throw std::invalid_argument("each ensemble run needs at least two records");

    double b2 = 0.0;
    for (double b : beta) b2 += b * b;

    // Positivity shift for the log fit, shared across the ensemble.
    double min_e = std::numeric_limits<double>::infinity();
    double max_abs_e = 0.0;
    for (const auto& records : ensemble)
        for (const auto& r : records) {
            min_e = std::min(min_e, r.energy);
            max_abs_e = std::max(max_abs_e, std::abs(r.energy));
        }
    const double floor_e = 1e-3 * (1.0 + max_abs_e);
    const double shift = min_e < floor_e ? floor_e - min_e : 0.0;

    GronwallFit fit;
    double rate = -std::numeric_limits<double>::infinity();
    for (const auto& records : ensemble) {
        std::vector<double> tau, y;
        const double t0 = records.front().t;
        for (const auto& r : records) {
            tau.push_back(r.t - t0);
            y.push_back(std::log(r.energy + shift));
        }
        double rms = 0.0;
        const double slope = lsq_slope(tau, y, &rms);
        rate = std::max(rate, slope);
        fit.fit_residual = std::max(fit.fit_residual, rms);
    }

    if (std::abs(rate) < 1e-12) {
        fit.degenerate = true;
        rate = 0.0;
    }
    rate = std::max(rate, 0.0);
    fit.c1 = b2 > 0.0 ? 2.0 * rate / b2 : 0.0;

    // Smallest C3 putting every training record inside the envelope, then
    // headroom so a held-out run from the same family fits too.
    const double growth = b2 > 0.0 ? 0.5 * fit.c1 * b2 : 0.0;
    double c3_need = 0.0;
    for (const auto& records : ensemble) {
        const double e0 = records.front().energy;
        const double t0 = records.front().t;
        for (const auto& r : records)
            c3_need = std::max(c3_need, r.energy * std::exp(-growth * (r.t - t0)) - e0);
    }
    fit.c3 = 1.5 * c3_need + 0.1 * (1.0 + max_abs_e);
    return fit;
}

} // namespace cch
