#pragma once

#include <complex>
#include <vector>

#include "cch/fields.hpp"

namespace cch::spectral {

/// Forward transform: samples -> Fourier coefficients, normalized so that
/// u(x) = sum_xi c_xi e^{i xi . x}. The result is symmetrized exactly
/// (c(-xi) = conj(c(xi)) bit for bit), so a constant input yields a spectrum
/// whose only nonzero entry is the mean mode.
/// Rejects non-finite input.
SpectralField forward(const PhysicalField& f);

/// Inverse transform: coefficients -> samples. Rejects spectra whose
/// conjugate-symmetry defect exceeds 1e-10 * (1 + max |c|), since those do
/// not represent real fields.
PhysicalField inverse(const SpectralField& f);

/// Per-axis spectral derivative, multiplier (i * xi_d). The Nyquist mode is
/// annihilated (its first derivative is not representable with a real
/// multiplier). Result count equals the dimension.
std::vector<SpectralField> gradient(const SpectralField& f);

/// Multiplier -|xi|^2.
SpectralField laplacian(const SpectralField& f);

/// Multiplier |xi|^4.
SpectralField bilaplacian(const SpectralField& f);

/// sum_d (i * xi_d) v_d, Nyquist modes annihilated per axis; requires one
/// component per dimension on a common domain.
SpectralField divergence(const std::vector<SpectralField>& v);

/// Zero every mode with max_d |xi_d| > cutoff. Idempotent, non-expansive,
/// leaves the retained coefficients bitwise untouched. cutoff >= 0.
SpectralField project(const SpectralField& f, int cutoff);

/// project() at the domain's dealias cutoff floor(fraction * P / 2).
SpectralField dealias(const SpectralField& f);

/// L2 norm over the box: sqrt(|Omega| * sum |c|^2) (Parseval with the
/// e^{i xi x} convention above).
double l2_norm(const SpectralField& f);

/// H1 seminorm sqrt(|Omega| * sum |xi|^2 |c|^2).
double h1_seminorm(const SpectralField& f);

/// L2 distance between two spectra on the same domain.
double l2_distance(const SpectralField& a, const SpectralField& b);

/// L2 distance between fields on different resolutions of the same box:
/// modes are matched by wavenumber, absent modes count as zero.
/// Dimensions must agree.
double l2_distance_cross(const SpectralField& a, const SpectralField& b);

/// |Omega| * mean of the samples (trapezoid == rectangle rule on a
/// periodic uniform grid).
double grid_integral(const PhysicalField& f);

} // namespace cch::spectral
