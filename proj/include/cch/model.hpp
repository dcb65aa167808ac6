#pragma once

#include <vector>

#include "cch/fields.hpp"
#include "cch/spectral.hpp"

namespace cch {

/// Parameters of the degenerate-mobility model
///
///   u_t = div(M_theta(u) grad mu) + beta . grad psi(u),
///   mu  = -gamma lap u + phi(u),
///
/// with M(u) = |u|^{2m}, regularized as M_theta(u) = M(u) where u^2 > theta
/// and theta^m otherwise. phi is an odd-degree polynomial with positive
/// leading coefficient, psi(u) = sum_i b_i u^{i+m}, and both share the same
/// degree index k (phi has 2k+1 coefficients, psi has k+1).
struct ModelParams {
    double gamma = 0.02;
    double m = 1.0;
    std::vector<double> beta;       // one entry per space dimension; empty = zero drift
    std::vector<double> phi_coeffs; // a_1 .. a_{2k+1}, coefficient of u^i at index i-1
    std::vector<double> psi_coeffs; // b_0 .. b_k, coefficient of u^{i+m} at index i
    double theta = 1e-2;            // regularization floor; 0 selects the raw mobility
    bool signed_power = false;      // extend u^{i+m} to u < 0 as sign(u)^i |u|^{i+m}

    ModelParams() : beta{0.0}, phi_coeffs{-1.0, 0.0, 1.0}, psi_coeffs{0.0, 1.0} {}

    int k() const { return static_cast<int>((phi_coeffs.size() - 1) / 2); }
    bool integer_exponent() const;
    double beta_norm2() const;
    bool operator==(const ModelParams&) const = default;

    /// Throws validation_error with a dotted key path on the first violated
    /// invariant. dimension is needed to check the drift vector length.
    void validate(int dimension) const;
};

/// Raw degenerate mobility |u|^{2m}.
double mobility(double u, const ModelParams& p);

/// Regularized mobility M_theta. Requires theta > 0.
double mobility_regularized(double u, const ModelParams& p);

/// M_theta when theta > 0, raw M when theta == 0.
double mobility_effective(double u, const ModelParams& p);

double phi(double u, const ModelParams& p);
double phi_prime(double u, const ModelParams& p);

/// Antiderivative of phi with value 0 at 0.
double potential(double u, const ModelParams& p);

/// psi(u) = sum_i b_i u^{i+m}. For non-integer m and u < 0 this is only
/// defined in signed_power mode; otherwise the evaluation is rejected.
double psi(double u, const ModelParams& p);
double psi_prime(double u, const ModelParams& p);

/// mu = -gamma lap u + phi(u), dealiased. Input modes beyond the dealias
/// cutoff are discarded with the same projection.
SpectralField chemical_potential(const SpectralField& u, const ModelParams& p);

/// Dealiased pseudo-spectral right-hand side
///   div(M_theta(u) grad mu) + beta . grad psi(u).
/// Nonlinear products are formed on the grid, derivatives in coefficient
/// space. The mean-mode entry of the result is exactly zero. Non-finite
/// intermediates (polynomial overflow on extreme states) raise blowup_error.
SpectralField rhs(const SpectralField& u, const ModelParams& p);

} // namespace cch
