#include "cch/model.hpp"

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace cch {
namespace {

// Compensated Horner (error-free transformations). Engaged for |u| > 10,
// where plain Horner on high-degree polynomials starts shedding digits that
// the energy diagnostics still need.
inline void two_sum(double a, double b, double& s, double& e) {
    s = a + b;
    const double z = s - a;
    e = (a - (s - z)) + (b - z);
}

inline void two_prod(double a, double b, double& p, double& e) {
    p = a * b;
    e = std::fma(a, b, -p);
}

double horner_compensated(std::span<const double> c, double u) {
    if (c.empty()) return 0.0;
    double s = c.back();
    double r = 0.0;
    for (std::size_t i = c.size() - 1; i-- > 0;) {
        double p, ep, es;
        two_prod(s, u, p, ep);
        two_sum(p, c[i], s, es);
        r = r * u + (ep + es);
    }
    return s + r;
}

double horner(std::span<const double> c, double u) {
    if (c.empty()) return 0.0;
    if (std::abs(u) > 10.0) return horner_compensated(c, u);
    double s = c.back();
    for (std::size_t i = c.size() - 1; i-- > 0;) s = s * u + c[i];
    return s;
}

// Buffer for derived coefficient sequences; model degrees are tiny, so a
// fixed stack array is plenty (validate() enforces the bound).
constexpr std::size_t kMaxCoeffs = 64;

} // namespace

bool ModelParams::integer_exponent() const {
    return m == std::floor(m);
}

double ModelParams::beta_norm2() const {
    double s = 0.0;
    for (double b : beta) s += b * b;
    return s;
}

void ModelParams::validate(int dimension) const {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw validation_error("model.gamma", "must be positive and finite");
    if (!(m > 0.0) || !std::isfinite(m))
        throw validation_error("model.m", "must be positive and finite");
    if (!(theta >= 0.0) || !std::isfinite(theta))
        throw validation_error("model.theta", "must be finite and >= 0");
    if (!beta.empty() && static_cast<int>(beta.size()) != dimension)
        throw validation_error("model.beta", "needs one entry per space dimension");
    for (double b : beta)
        if (!std::isfinite(b)) throw validation_error("model.beta", "entries must be finite");

    if (phi_coeffs.size() < 3 || phi_coeffs.size() % 2 == 0)
        throw validation_error("model.phi_coeffs",
                               "needs an odd count >= 3 (degrees 1 .. 2k+1 with k >= 1)");
    if (phi_coeffs.size() > kMaxCoeffs - 2)
        throw validation_error("model.phi_coeffs", "degree out of supported range");
    if (!(phi_coeffs.back() > 0.0))
        throw validation_error("model.phi_coeffs", "leading coefficient must be positive");
    for (double a : phi_coeffs)
        if (!std::isfinite(a)) throw validation_error("model.phi_coeffs", "entries must be finite");

    if (psi_coeffs.size() != static_cast<std::size_t>(k()) + 1)
        throw validation_error("model.psi_coeffs",
                               "needs exactly k+1 entries (k from phi_coeffs)");
    for (double b : psi_coeffs)
        if (!std::isfinite(b)) throw validation_error("model.psi_coeffs", "entries must be finite");
}

double mobility(double u, const ModelParams& p) {
    const double u2 = u * u;
    if (p.m == 1.0) return u2;
    if (p.integer_exponent()) {
        double r = 1.0;
        for (int i = 0; i < static_cast<int>(p.m); ++i) r *= u2;
        return r;
    }
    return std::pow(u2, p.m);
}

double mobility_regularized(double u, const ModelParams& p) {
    if (!(p.theta > 0.0))
        throw std::invalid_argument("regularized mobility requires theta > 0");
    if (u * u > p.theta) return mobility(u, p);
    return std::pow(p.theta, p.m);
}

double mobility_effective(double u, const ModelParams& p) {
    return p.theta > 0.0 ? mobility_regularized(u, p) : mobility(u, p);
}

double phi(double u, const ModelParams& p) {
    // phi(u) = u * H(u) with H collecting a_1..a_{2k+1} as powers 0..2k.
    return u * horner(p.phi_coeffs, u);
}

double phi_prime(double u, const ModelParams& p) {
    double c[kMaxCoeffs];
    const std::size_t n = p.phi_coeffs.size();
    for (std::size_t i = 0; i < n; ++i) c[i] = static_cast<double>(i + 1) * p.phi_coeffs[i];
    return horner(std::span<const double>(c, n), u);
}

double potential(double u, const ModelParams& p) {
    // Phi(u) = u^2 * sum_i a_i u^{i-1} / (i+1), fixing Phi(0) = 0.
    double c[kMaxCoeffs];
    const std::size_t n = p.phi_coeffs.size();
    for (std::size_t i = 0; i < n; ++i) c[i] = p.phi_coeffs[i] / static_cast<double>(i + 2);
    return u * u * horner(std::span<const double>(c, n), u);
}

double psi(double u, const ModelParams& p) {
    if (u == 0.0) {
        // Every term carries u^{i+m} with i + m >= m > 0.
        return 0.0;
    }
    if (p.integer_exponent()) {
        double um = 1.0;
        for (int i = 0; i < static_cast<int>(p.m); ++i) um *= u;
        return um * horner(p.psi_coeffs, u);
    }
    if (u > 0.0) return std::pow(u, p.m) * horner(p.psi_coeffs, u);
    if (p.signed_power) {
        // sum_i b_i sign(u)^i |u|^{i+m} = |u|^m sum_i b_i u^i for u < 0.
        return std::pow(-u, p.m) * horner(p.psi_coeffs, u);
    }
    throw std::domain_error("psi undefined for negative argument with non-integer exponent "
                            "(enable signed_power to select the odd extension)");
}

double psi_prime(double u, const ModelParams& p) {
    double c[kMaxCoeffs];
    const std::size_t n = p.psi_coeffs.size();
    for (std::size_t i = 0; i < n; ++i)
        c[i] = (static_cast<double>(i) + p.m) * p.psi_coeffs[i];
    const std::span<const double> w(c, n);
    if (p.integer_exponent()) {
        const int e = static_cast<int>(p.m) - 1;
        double um = 1.0;
        if (e >= 0)
            for (int i = 0; i < e; ++i) um *= u;
        else
            um = u == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / u;
        return um * horner(w, u);
    }
    if (u > 0.0 || u == 0.0) return std::pow(u, p.m - 1.0) * horner(w, u);
    if (p.signed_power) return -std::pow(-u, p.m - 1.0) * horner(w, u);
    throw std::domain_error("psi_prime undefined for negative argument with non-integer "
                            "exponent (enable signed_power to select the odd extension)");
}

SpectralField chemical_potential(const SpectralField& u, const ModelParams& p) {
    const PhysicalField u_phys = spectral::inverse(u);
    PhysicalField phi_vals(u.domain);
    for (std::size_t i = 0; i < u_phys.values.size(); ++i)
        phi_vals.values[i] = phi(u_phys.values[i], p);
    for (double v : phi_vals.values)
        if (!std::isfinite(v)) throw blowup_error("non-finite value evaluating phi(u)");

    SpectralField mu = spectral::laplacian(u);
    const SpectralField phi_hat = spectral::forward(phi_vals);
    for (std::size_t i = 0; i < mu.coeffs.size(); ++i)
        mu.coeffs[i] = -p.gamma * mu.coeffs[i] + phi_hat.coeffs[i];
    return spectral::dealias(mu);
}

SpectralField rhs(const SpectralField& u, const ModelParams& p) {
    const DomainSpec& d = u.domain;
    const PhysicalField u_phys = spectral::inverse(u);
    for (double v : u_phys.values)
        if (!std::isfinite(v)) throw blowup_error("non-finite state in rhs evaluation");

    const SpectralField mu = chemical_potential(u, p);
    const std::vector<SpectralField> grad_mu = spectral::gradient(mu);

    std::vector<double> mob(u_phys.values.size());
    for (std::size_t i = 0; i < mob.size(); ++i)
        mob[i] = mobility_effective(u_phys.values[i], p);

    std::vector<SpectralField> flux;
    flux.reserve(grad_mu.size());
    for (const auto& g : grad_mu) {
        PhysicalField g_phys = spectral::inverse(g);
        for (std::size_t i = 0; i < g_phys.values.size(); ++i) g_phys.values[i] *= mob[i];
        flux.push_back(spectral::dealias(spectral::forward(g_phys)));
    }
    SpectralField out = spectral::divergence(flux);

    if (p.beta_norm2() > 0.0) {
        PhysicalField psi_vals(d);
        for (std::size_t i = 0; i < u_phys.values.size(); ++i)
            psi_vals.values[i] = psi(u_phys.values[i], p);
        for (double v : psi_vals.values)
            if (!std::isfinite(v)) throw blowup_error("non-finite value evaluating psi(u)");
        const SpectralField psi_hat = spectral::dealias(spectral::forward(psi_vals));
        const std::vector<SpectralField> psi_grad = spectral::gradient(psi_hat);
        for (std::size_t dcomp = 0; dcomp < psi_grad.size(); ++dcomp) {
            const double b = p.beta[dcomp];
            if (b == 0.0) continue;
            for (std::size_t i = 0; i < out.coeffs.size(); ++i)
                out.coeffs[i] += b * psi_grad[dcomp].coeffs[i];
        }
    }

    for (const auto& c : out.coeffs)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw blowup_error("non-finite coefficient in rhs");
    return out;
}

} // namespace cch
