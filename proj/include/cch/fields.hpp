#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "cch/errors.hpp"

namespace cch {

/// Exact fraction. Dealiasing cutoffs are derived from it with integer
/// arithmetic only, so a config value like "2/3" survives serialization
/// round trips bit-exactly and never depends on floating-point parsing.
struct Rational {
    long num = 2;
    long den = 3;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Rational&) const = default;
};

/// Periodic box [0, 2*pi]^dimension sampled on a uniform grid with
/// points_per_axis nodes per axis. dimension is 1 or 2; points_per_axis
/// is a power of two >= 8 so the transform sizes stay exact.
struct DomainSpec {
    int dimension = 1;
    int points_per_axis = 128;
    Rational dealias_fraction{2, 3};

    static constexpr double period = 2.0 * std::numbers::pi;

    std::size_t grid_size() const {
        std::size_t n = static_cast<std::size_t>(points_per_axis);
        return dimension == 1 ? n : n * n;
    }
    double box_volume() const {
        return dimension == 1 ? period : period * period;
    }
    double cell_volume() const {
        return box_volume() / static_cast<double>(grid_size());
    }
    double grid_spacing() const { return period / points_per_axis; }
    int nyquist() const { return points_per_axis / 2; }

    /// floor(dealias_fraction * points_per_axis / 2) computed in integers.
    int dealias_cutoff() const {
        return static_cast<int>((static_cast<long>(points_per_axis) / 2 * dealias_fraction.num) /
                                dealias_fraction.den);
    }

    void validate() const;
    bool operator==(const DomainSpec&) const = default;
};

/// Real samples u(x_j), row major: 1D index j <-> x = 2*pi*j/P;
/// 2D index j = jx*P + jy <-> (x, y) = (2*pi*jx/P, 2*pi*jy/P).
struct PhysicalField {
    DomainSpec domain;
    std::vector<double> values;

    PhysicalField() = default;
    explicit PhysicalField(const DomainSpec& d) : domain(d), values(d.grid_size(), 0.0) {}
};

/// Full complex spectrum in FFT index order, same row-major layout as
/// PhysicalField. Index i along an axis carries the integer wavenumber
/// freq(i) = i <= P/2 ? i : i - P. Every SpectralField is expected to
/// satisfy conjugate symmetry c(-xi) = conj(c(xi)); transforms enforce
/// and check it so fields always represent real data.
struct SpectralField {
    DomainSpec domain;
    std::vector<std::complex<double>> coeffs;

    SpectralField() = default;
    explicit SpectralField(const DomainSpec& d) : domain(d), coeffs(d.grid_size(), 0.0) {}
};

/// Integer wavenumber carried by axis index i on a P-point grid.
inline int freq(int i, int points_per_axis) {
    return i <= points_per_axis / 2 ? i : i - points_per_axis;
}

/// Flat index of the mode with wavenumbers (kx[, ky]), each in (-P/2, P/2].
std::size_t mode_index(const DomainSpec& d, int kx, int ky = 0);

/// Visit every mode: fn(flat_index, kx, ky); ky is 0 in one dimension.
template <class Fn>
void for_each_mode(const DomainSpec& d, Fn&& fn) {
    const int p = d.points_per_axis;
    if (d.dimension == 1) {
        for (int i = 0; i < p; ++i) fn(static_cast<std::size_t>(i), freq(i, p), 0);
    } else {
        std::size_t idx = 0;
        for (int ix = 0; ix < p; ++ix) {
            const int kx = freq(ix, p);
            for (int iy = 0; iy < p; ++iy, ++idx) fn(idx, kx, freq(iy, p));
        }
    }
}

} // namespace cch
