#include "cch/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace cch {

void DomainSpec::validate() const {
    if (dimension != 1 && dimension != 2)
        throw validation_error("domain.dimension", "must be 1 or 2");
    if (points_per_axis < 8 || (points_per_axis & (points_per_axis - 1)) != 0)
        throw validation_error("domain.points_per_axis", "must be a power of two >= 8");
    if (dealias_fraction.den <= 0 || dealias_fraction.num <= 0 ||
        dealias_fraction.num > dealias_fraction.den)
        throw validation_error("domain.dealias_fraction", "must be a fraction in (0, 1]");
}

std::size_t mode_index(const DomainSpec& d, int kx, int ky) {
    const int p = d.points_per_axis;
    auto wrap = [p](int k) {
        if (k < -p / 2 || k > p / 2)
            throw std::invalid_argument("wavenumber outside representable range");
        return static_cast<std::size_t>(k >= 0 ? k : k + p);
    };
    if (d.dimension == 1) return wrap(kx);
    return wrap(kx) * static_cast<std::size_t>(p) + wrap(ky);
}

namespace spectral {
namespace {

/// One cached plan per (dimension, size, direction). Plans are created with
/// FFTW_ESTIMATE so planning never samples the data (keeps runs deterministic)
/// and FFTW_UNALIGNED so the new-array execute below is legal for any buffer.
class PlanCache {
public:
    void execute(int dim, int n, int sign, std::complex<double>* in, std::complex<double>* out) {
        fftw_plan plan = nullptr;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto key = std::make_tuple(dim, n, sign);
            auto it = plans_.find(key);
            if (it == plans_.end()) {
                std::size_t count = dim == 1 ? static_cast<std::size_t>(n)
                                             : static_cast<std::size_t>(n) * n;
                std::vector<std::complex<double>> a(count), b(count);
                auto* fa = reinterpret_cast<fftw_complex*>(a.data());
                auto* fb = reinterpret_cast<fftw_complex*>(b.data());
                unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
                plan = dim == 1 ? fftw_plan_dft_1d(n, fa, fb, sign, flags)
                                : fftw_plan_dft_2d(n, n, fa, fb, sign, flags);
                if (!plan) throw std::runtime_error("fftw plan creation failed");
                plans_.emplace(key, plan);
            } else {
                plan = it->second;
            }
        }
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in),
                         reinterpret_cast<fftw_complex*>(out));
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

std::size_t mirror_index(const DomainSpec& d, std::size_t i) {
    const int p = d.points_per_axis;
    if (d.dimension == 1) return static_cast<std::size_t>((p - static_cast<int>(i)) % p);
    const int ix = static_cast<int>(i) / p;
    const int iy = static_cast<int>(i) % p;
    return static_cast<std::size_t>((p - ix) % p) * p + static_cast<std::size_t>((p - iy) % p);
}

void check_same_domain(const DomainSpec& a, const DomainSpec& b) {
    if (!(a == b)) throw std::invalid_argument("fields live on different domains");
}

} // namespace

SpectralField forward(const PhysicalField& f) {
    f.domain.validate();
    if (f.values.size() != f.domain.grid_size())
        throw std::invalid_argument("sample count does not match domain");
    for (double v : f.values)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite sample in forward transform");

    SpectralField out(f.domain);
    std::vector<std::complex<double>> buf(f.values.begin(), f.values.end());
    cache().execute(f.domain.dimension, f.domain.points_per_axis, FFTW_FORWARD, buf.data(),
                    out.coeffs.data());

    const double scale = 1.0 / static_cast<double>(f.domain.grid_size());
    for (auto& c : out.coeffs) c *= scale;

    // Exact symmetrization: pair each mode with its mirror so that
    // c(-xi) == conj(c(xi)) holds bitwise. Self-paired modes become real.
    auto& c = out.coeffs;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const std::size_t j = mirror_index(f.domain, i);
        if (j < i) continue;
        if (j == i) {
            c[i] = std::complex<double>(c[i].real(), 0.0);
        } else {
            const std::complex<double> avg = 0.5 * (c[i] + std::conj(c[j]));
            c[i] = avg;
            c[j] = std::conj(avg);
        }
    }
    return out;
}

PhysicalField inverse(const SpectralField& f) {
    f.domain.validate();
    if (f.coeffs.size() != f.domain.grid_size())
        throw std::invalid_argument("coefficient count does not match domain");

    double max_abs = 0.0;
    for (const auto& c : f.coeffs) max_abs = std::max(max_abs, std::abs(c));
    if (!std::isfinite(max_abs))
        throw std::invalid_argument("non-finite coefficient in inverse transform");
    double defect = 0.0;
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
        const std::size_t j = mirror_index(f.domain, i);
        if (j < i) continue;
        defect = std::max(defect, std::abs(f.coeffs[j] - std::conj(f.coeffs[i])));
    }
    if (defect > 1e-10 * (1.0 + max_abs))
        throw std::invalid_argument("spectrum is not conjugate-symmetric: defect " +
                                    std::to_string(defect));

    std::vector<std::complex<double>> in(f.coeffs);
    std::vector<std::complex<double>> buf(f.coeffs.size());
    cache().execute(f.domain.dimension, f.domain.points_per_axis, FFTW_BACKWARD, in.data(),
                    buf.data());

    PhysicalField out(f.domain);
    for (std::size_t i = 0; i < buf.size(); ++i) out.values[i] = buf[i].real();
    return out;
}

std::vector<SpectralField> gradient(const SpectralField& f) {
    const int p = f.domain.points_per_axis;
    const int nyq = p / 2;
    std::vector<SpectralField> out(static_cast<std::size_t>(f.domain.dimension),
                                   SpectralField(f.domain));
    for_each_mode(f.domain, [&](std::size_t i, int kx, int ky) {
        const double mx = (kx == nyq || kx == -nyq) ? 0.0 : static_cast<double>(kx);
        out[0].coeffs[i] = f.coeffs[i] * std::complex<double>(0.0, mx);
        if (f.domain.dimension == 2) {
            const double my = (ky == nyq || ky == -nyq) ? 0.0 : static_cast<double>(ky);
            out[1].coeffs[i] = f.coeffs[i] * std::complex<double>(0.0, my);
        }
    });
    return out;
}

SpectralField laplacian(const SpectralField& f) {
    SpectralField out(f.domain);
    for_each_mode(f.domain, [&](std::size_t i, int kx, int ky) {
        const double k2 = static_cast<double>(kx) * kx + static_cast<double>(ky) * ky;
        out.coeffs[i] = -k2 * f.coeffs[i];
    });
    return out;
}

SpectralField bilaplacian(const SpectralField& f) {
    SpectralField out(f.domain);
    for_each_mode(f.domain, [&](std::size_t i, int kx, int ky) {
        const double k2 = static_cast<double>(kx) * kx + static_cast<double>(ky) * ky;
        out.coeffs[i] = (k2 * k2) * f.coeffs[i];
    });
    return out;
}

SpectralField divergence(const std::vector<SpectralField>& v) {
    if (v.empty()) throw std::invalid_argument("divergence of empty vector field");
    const DomainSpec& d = v.front().domain;
    if (static_cast<int>(v.size()) != d.dimension)
        throw std::invalid_argument("component count does not match dimension");
    for (const auto& comp : v) check_same_domain(comp.domain, d);

    const int nyq = d.points_per_axis / 2;
    SpectralField out(d);
    for_each_mode(d, [&](std::size_t i, int kx, int ky) {
        const double mx = (kx == nyq || kx == -nyq) ? 0.0 : static_cast<double>(kx);
        std::complex<double> s = v[0].coeffs[i] * std::complex<double>(0.0, mx);
        if (d.dimension == 2) {
            const double my = (ky == nyq || ky == -nyq) ? 0.0 : static_cast<double>(ky);
            s += v[1].coeffs[i] * std::complex<double>(0.0, my);
        }
        out.coeffs[i] = s;
    });
    return out;
}

SpectralField project(const SpectralField& f, int cutoff) {
    if (cutoff < 0) throw std::invalid_argument("projection cutoff must be >= 0");
    SpectralField out = f;
    for_each_mode(f.domain, [&](std::size_t i, int kx, int ky) {
        if (std::abs(kx) > cutoff || std::abs(ky) > cutoff) out.coeffs[i] = 0.0;
    });
    return out;
}

SpectralField dealias(const SpectralField& f) {
    return project(f, f.domain.dealias_cutoff());
}

double l2_norm(const SpectralField& f) {
    double s = 0.0;
    for (const auto& c : f.coeffs) s += std::norm(c);
    return std::sqrt(f.domain.box_volume() * s);
}

double h1_seminorm(const SpectralField& f) {
    double s = 0.0;
    for_each_mode(f.domain, [&](std::size_t i, int kx, int ky) {
        const double k2 = static_cast<double>(kx) * kx + static_cast<double>(ky) * ky;
        s += k2 * std::norm(f.coeffs[i]);
    });
    return std::sqrt(f.domain.box_volume() * s);
}

double l2_distance(const SpectralField& a, const SpectralField& b) {
    check_same_domain(a.domain, b.domain);
    double s = 0.0;
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) s += std::norm(a.coeffs[i] - b.coeffs[i]);
    return std::sqrt(a.domain.box_volume() * s);
}

double l2_distance_cross(const SpectralField& a, const SpectralField& b) {
    if (a.domain.dimension != b.domain.dimension)
        throw std::invalid_argument("cross-resolution distance needs equal dimensions");
    if (a.domain.points_per_axis == b.domain.points_per_axis) return l2_distance(a, b);
    const SpectralField& coarse = a.domain.points_per_axis < b.domain.points_per_axis ? a : b;
    const SpectralField& fine = a.domain.points_per_axis < b.domain.points_per_axis ? b : a;
    const int nc = coarse.domain.nyquist();
    double s = 0.0;
    for_each_mode(fine.domain, [&](std::size_t i, int kx, int ky) {
        // Modes on the coarse Nyquist line alias there, so the coarse side
        // counts as zero; dealiased states never populate that line anyway.
        std::complex<double> cc = 0.0;
        if (std::abs(kx) < nc && std::abs(ky) < nc)
            cc = coarse.coeffs[mode_index(coarse.domain, kx, ky)];
        s += std::norm(fine.coeffs[i] - cc);
    });
    return std::sqrt(fine.domain.box_volume() * s);
}

double grid_integral(const PhysicalField& f) {
    double s = 0.0;
    for (double v : f.values) s += v;
    return f.domain.cell_volume() * s;
}

} // namespace spectral
} // namespace cch
