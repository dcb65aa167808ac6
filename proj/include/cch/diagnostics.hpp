#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cch/fields.hpp"
#include "cch/model.hpp"

namespace cch {

/// One row of the run diagnostics stream. Serialized column order is fixed:
/// t, mass, energy, dissipation, source_bound, ineq_residual, l2, h1,
/// max_abs, min_abs, degeneracy_measure.
struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    double dissipation = 0.0;
    double source_bound = 0.0;
    double ineq_residual = 0.0;
    double l2 = 0.0;
    double h1 = 0.0;
    double max_abs = 0.0;
    double min_abs = 0.0;
    double degeneracy_measure = 0.0;
};

struct FieldNorms {
    double l2 = 0.0;
    double h1 = 0.0; // H1 seminorm
    double max_abs = 0.0;
    double min_abs = 0.0;
};

/// |Omega| times the mean-mode coefficient — exact under the forward
/// transform's normalization.
double mass(const SpectralField& u);

/// Quadrature of gamma/2 |grad u|^2 + Phi(u); the gradient is spectral.
double energy(const SpectralField& u, const ModelParams& p);

/// Quadrature of M_theta(u) |grad mu|^2 with grad mu assembled as
/// gamma grad lap u - phi'(u) grad u. (The model's two stated forms of
/// grad mu differ by an overall sign; the square is unaffected.)
double dissipation(const SpectralField& u, const ModelParams& p);

/// (|beta|^2 / 2) * quadrature of psi(u)^2 / M_theta(u). Zero drift gives
/// exactly 0; otherwise theta > 0 is required so the denominator has the
/// uniform lower bound theta^m.
double source_bound(const SpectralField& u, const ModelParams& p);

/// Pre-Young residual of the energy inequality between consecutive records:
///   (E_next - E_prev) / (t_next - t_prev) + dissipation_next / 2
///   - source_bound_next.
/// Nonpositive (up to a tolerance) when the discrete estimate holds.
double check_energy_inequality(const DiagnosticsRecord& prev, const DiagnosticsRecord& next);

/// Worst margin max_t [ E(t) - e^{C1 |beta|^2 tau / 2} (E(t0) + C3) ] with
/// tau = t - t0; nonpositive means the exponential envelope holds.
double gronwall_envelope(std::span<const DiagnosticsRecord> records, double c1, double c3,
                         std::span<const double> beta);

FieldNorms norms(const SpectralField& u);

/// Fraction of grid nodes with |u| <= eps_deg (proxy for the complement of
/// the non-degenerate set). Nondecreasing in eps_deg.
double degeneracy_measure(const SpectralField& u, double eps_deg);

/// Assemble a record at time t. prev supplies the inequality residual
/// (0 for the first record). with_source_bound gates the theta > 0 integral
/// so fully degenerate runs stay representable (column is 0 there).
DiagnosticsRecord make_record(double t, const SpectralField& u, const ModelParams& p,
                              double eps_deg, const DiagnosticsRecord* prev,
                              bool with_source_bound);

/// CSV serialization: mandatory header, 17-significant-digit values, so a
/// written stream rereads to bit-identical records.
extern const char* const kDiagnosticsCsvHeader;
void write_csv_header(std::ostream& os);
void append_csv_row(std::ostream& os, const DiagnosticsRecord& rec);
std::vector<DiagnosticsRecord> read_csv(std::istream& is);
std::vector<DiagnosticsRecord> read_csv_file(const std::string& path);

} // namespace cch
