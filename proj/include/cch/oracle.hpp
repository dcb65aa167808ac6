#pragma once

#include "cch/fields.hpp"
#include "cch/model.hpp"

namespace cch {

/// Which of the two equivalent weak forms of the convective term the oracle
/// integrates. They differ by an integration by parts and must agree under
/// periodicity; the tests check both.
enum class ConvectiveForm {
    GradPsiAgainstBasis,  // + beta . integral of grad(psi(u)) * test
    PsiAgainstGradBasis,  // - beta . integral of psi(u) * grad(test)
};

/// Reference right-hand side of the truncated Galerkin system, computed
/// without FFTs: the state is truncated to modes |xi|_inf <= n_small,
/// evaluated on an oversampled grid (>= 8x the mode count per axis) from
/// explicit e^{i xi x} tables, and the weak-form integrals are taken by
/// direct quadrature for every retained test mode. No dealiasing shortcut
/// is involved; this is the measuring stick the production rhs is compared
/// against. Modes above n_small in the result are zero.
///
/// n_small is a cost guard (<= 8 per axis) and must sit below the domain
/// Nyquist index.
SpectralField galerkin_oracle_rhs(const SpectralField& u, const ModelParams& p, int n_small,
                                  ConvectiveForm form = ConvectiveForm::PsiAgainstGradBasis);

} // namespace cch
