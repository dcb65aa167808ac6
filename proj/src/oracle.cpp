#include "cch/oracle.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace cch {
namespace {

using cd = std::complex<double>;

int fine_axis_points(int n_small) {
    int need = 8 * (2 * n_small + 1);
    int p = 1;
    while (p < need) p *= 2;
    return p;
}

/// e^{i k x_j} for k = -n..n (row k+n), x_j = 2 pi j / pf.
std::vector<std::vector<cd>> phase_table(int n, int pf) {
    std::vector<std::vector<cd>> table(2 * n + 1, std::vector<cd>(pf));
    for (int k = -n; k <= n; ++k)
        for (int j = 0; j < pf; ++j) {
            const double arg = 2.0 * std::numbers::pi * k * j / pf;
            table[k + n][j] = cd(std::cos(arg), std::sin(arg));
        }
    return table;
}

} // namespace

SpectralField galerkin_oracle_rhs(const SpectralField& u, const ModelParams& p, int n_small,
                                  ConvectiveForm form) {
    u.domain.validate();
    p.validate(u.domain.dimension);
    if (n_small < 1 || n_small > 8)
        throw std::invalid_argument("oracle is test-scale only: n_small must be in [1, 8]");
    if (n_small >= u.domain.nyquist())
        throw std::invalid_argument("n_small must sit below the domain Nyquist index");

    const int dim = u.domain.dimension;
    const int n = n_small;
    const int pf = fine_axis_points(n);
    const std::size_t fine_count =
        dim == 1 ? static_cast<std::size_t>(pf) : static_cast<std::size_t>(pf) * pf;
    const auto table = phase_table(n, pf);

    // Retained modes of the truncated state u^N.
    struct Mode {
        int kx, ky;
        cd c;
    };
    std::vector<Mode> modes;
    for (int kx = -n; kx <= n; ++kx) {
        if (dim == 1) {
            modes.push_back({kx, 0, u.coeffs[mode_index(u.domain, kx)]});
        } else {
            for (int ky = -n; ky <= n; ++ky)
                modes.push_back({kx, ky, u.coeffs[mode_index(u.domain, kx, ky)]});
        }
    }

    // Pointwise samples of u^N and its derivatives on the fine grid, by
    // direct summation over modes.
    std::vector<double> us(fine_count), ux(fine_count, 0.0), uy(fine_count, 0.0);
    std::vector<double> glx(fine_count, 0.0), gly(fine_count, 0.0); // grad(lap u)
    for (std::size_t j = 0; j < fine_count; ++j) {
        const int jx = dim == 1 ? static_cast<int>(j) : static_cast<int>(j) / pf;
        const int jy = dim == 1 ? 0 : static_cast<int>(j) % pf;
        cd su = 0.0, sx = 0.0, sy = 0.0, slx = 0.0, sly = 0.0;
        for (const Mode& m : modes) {
            const cd e = dim == 1 ? table[m.kx + n][jx]
                                  : table[m.kx + n][jx] * table[m.ky + n][jy];
            const cd ce = m.c * e;
            const double k2 =
                static_cast<double>(m.kx) * m.kx + static_cast<double>(m.ky) * m.ky;
            su += ce;
            sx += cd(0.0, m.kx) * ce;
            slx += cd(0.0, -m.kx * k2) * ce;
            if (dim == 2) {
                sy += cd(0.0, m.ky) * ce;
                sly += cd(0.0, -m.ky * k2) * ce;
            }
        }
        us[j] = su.real();
        ux[j] = sx.real();
        glx[j] = slx.real();
        if (dim == 2) {
            uy[j] = sy.real();
            gly[j] = sly.real();
        }
    }

    // Pointwise integrand pieces: w = M_theta(u) grad(mu) with
    // grad(mu) = phi'(u) grad u - gamma grad(lap u).
    std::vector<double> wx(fine_count), wy(fine_count, 0.0);
    std::vector<double> psis(fine_count, 0.0), conv_dot(fine_count, 0.0);
    const double b2 = p.beta_norm2();
    for (std::size_t j = 0; j < fine_count; ++j) {
        const double mob = mobility_effective(us[j], p);
        const double pp = phi_prime(us[j], p);
        wx[j] = mob * (pp * ux[j] - p.gamma * glx[j]);
        if (dim == 2) wy[j] = mob * (pp * uy[j] - p.gamma * gly[j]);
        if (b2 > 0.0) {
            if (form == ConvectiveForm::PsiAgainstGradBasis) {
                psis[j] = psi(us[j], p);
            } else {
                const double dpsi = psi_prime(us[j], p);
                conv_dot[j] = p.beta[0] * dpsi * ux[j];
                if (dim == 2) conv_dot[j] += p.beta[1] * dpsi * uy[j];
            }
        }
    }

    // Quadrature projection q_xi(g) = (1/Nf) sum_j g_j e^{-i xi x_j} and the
    // weak-form assembly per retained test mode.
    SpectralField out(u.domain);
    const double inv = 1.0 / static_cast<double>(fine_count);
    for (const Mode& m : modes) {
        cd qwx = 0.0, qwy = 0.0, qpsi = 0.0, qconv = 0.0;
        for (std::size_t j = 0; j < fine_count; ++j) {
            const int jx = dim == 1 ? static_cast<int>(j) : static_cast<int>(j) / pf;
            const int jy = dim == 1 ? 0 : static_cast<int>(j) % pf;
            const cd e = dim == 1 ? std::conj(table[m.kx + n][jx])
                                  : std::conj(table[m.kx + n][jx] * table[m.ky + n][jy]);
            qwx += wx[j] * e;
            if (dim == 2) qwy += wy[j] * e;
            if (b2 > 0.0) {
                if (form == ConvectiveForm::PsiAgainstGradBasis)
                    qpsi += psis[j] * e;
                else
                    qconv += conv_dot[j] * e;
            }
        }
        qwx *= inv;
        qwy *= inv;
        qpsi *= inv;
        qconv *= inv;

        // Diffusive part div(M grad mu): i xi . q(M grad mu). Convective
        // part per form: i (beta . xi) q(psi)  or  q(beta . grad psi).
        cd cdot = cd(0.0, m.kx) * qwx;
        if (dim == 2) cdot += cd(0.0, m.ky) * qwy;
        if (b2 > 0.0) {
            if (form == ConvectiveForm::PsiAgainstGradBasis) {
                double bxi = p.beta[0] * m.kx;
                if (dim == 2) bxi += p.beta[1] * m.ky;
                cdot += cd(0.0, bxi) * qpsi;
            } else {
                cdot += qconv;
            }
        }
        out.coeffs[mode_index(out.domain, m.kx, m.ky)] = cdot;
    }
    return out;
}

} // namespace cch
