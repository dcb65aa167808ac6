#include "cch/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cch/spectral.hpp"

namespace cch {
namespace {

std::vector<PhysicalField> gradient_samples(const SpectralField& u) {
    std::vector<PhysicalField> out;
    for (const auto& g : spectral::gradient(u)) out.push_back(spectral::inverse(g));
    return out;
}

/// grad mu on the grid, assembled as gamma * grad(lap u) - phi'(u) * grad u.
std::vector<PhysicalField> grad_mu_samples(const SpectralField& u, const ModelParams& p,
                                           const PhysicalField& u_phys) {
    const SpectralField lap = spectral::laplacian(u);
    const std::vector<SpectralField> grad_lap = spectral::gradient(lap);
    const std::vector<SpectralField> grad_u = spectral::gradient(u);
    std::vector<PhysicalField> out;
    for (std::size_t d = 0; d < grad_lap.size(); ++d) {
        PhysicalField gl = spectral::inverse(grad_lap[d]);
        const PhysicalField gu = spectral::inverse(grad_u[d]);
        for (std::size_t i = 0; i < gl.values.size(); ++i)
            gl.values[i] = p.gamma * gl.values[i] - phi_prime(u_phys.values[i], p) * gu.values[i];
        out.push_back(std::move(gl));
    }
    return out;
}

} // namespace

double mass(const SpectralField& u) {
    return u.domain.box_volume() * u.coeffs[0].real();
}

double energy(const SpectralField& u, const ModelParams& p) {
    const PhysicalField u_phys = spectral::inverse(u);
    const std::vector<PhysicalField> grads = gradient_samples(u);
    double acc = 0.0;
    for (std::size_t i = 0; i < u_phys.values.size(); ++i) {
        double g2 = 0.0;
        for (const auto& g : grads) g2 += g.values[i] * g.values[i];
        acc += 0.5 * p.gamma * g2 + potential(u_phys.values[i], p);
    }
    return u.domain.cell_volume() * acc;
}

double dissipation(const SpectralField& u, const ModelParams& p) {
    const PhysicalField u_phys = spectral::inverse(u);
    const std::vector<PhysicalField> gm = grad_mu_samples(u, p, u_phys);
    double acc = 0.0;
    for (std::size_t i = 0; i < u_phys.values.size(); ++i) {
        double g2 = 0.0;
        for (const auto& g : gm) g2 += g.values[i] * g.values[i];
        acc += mobility_effective(u_phys.values[i], p) * g2;
    }
    return u.domain.cell_volume() * acc;
}

double source_bound(const SpectralField& u, const ModelParams& p) {
    const double b2 = p.beta_norm2();
    if (b2 == 0.0) return 0.0;
    if (!(p.theta > 0.0))
        throw std::invalid_argument("source_bound requires theta > 0 (denominator bound)");
    const PhysicalField u_phys = spectral::inverse(u);
    double acc = 0.0;
    for (double v : u_phys.values) {
        const double s = psi(v, p);
        acc += s * s / mobility_regularized(v, p);
    }
    return 0.5 * b2 * u.domain.cell_volume() * acc;
}

double check_energy_inequality(const DiagnosticsRecord& prev, const DiagnosticsRecord& next) {
    if (!(next.t > prev.t))
        throw std::invalid_argument("records out of order in energy-inequality check");
    return (next.energy - prev.energy) / (next.t - prev.t) + 0.5 * next.dissipation -
           next.source_bound;
}

double gronwall_envelope(std::span<const DiagnosticsRecord> records, double c1, double c3,
                         std::span<const double> beta) {
    if (records.empty()) return 0.0;
    double b2 = 0.0;
    for (double b : beta) b2 += b * b;
    const double e0 = records.front().energy;
    const double t0 = records.front().t;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& r : records) {
        const double envelope = std::exp(0.5 * c1 * b2 * (r.t - t0)) * (e0 + c3);
        worst = std::max(worst, r.energy - envelope);
    }
    return worst;
}

FieldNorms norms(const SpectralField& u) {
    FieldNorms n;
    n.l2 = spectral::l2_norm(u);
    n.h1 = spectral::h1_seminorm(u);
    const PhysicalField u_phys = spectral::inverse(u);
    n.max_abs = 0.0;
    n.min_abs = std::numeric_limits<double>::infinity();
    for (double v : u_phys.values) {
        const double a = std::abs(v);
        n.max_abs = std::max(n.max_abs, a);
        n.min_abs = std::min(n.min_abs, a);
    }
    return n;
}

double degeneracy_measure(const SpectralField& u, double eps_deg) {
    if (!(eps_deg > 0.0)) throw std::invalid_argument("eps_deg must be positive");
    const PhysicalField u_phys = spectral::inverse(u);
    std::size_t count = 0;
    for (double v : u_phys.values)
        if (std::abs(v) <= eps_deg) ++count;
    return static_cast<double>(count) / static_cast<double>(u_phys.values.size());
}

DiagnosticsRecord make_record(double t, const SpectralField& u, const ModelParams& p,
                              double eps_deg, const DiagnosticsRecord* prev,
                              bool with_source_bound) {
    DiagnosticsRecord rec;
    rec.t = t;
    rec.mass = mass(u);
    rec.energy = energy(u, p);
    rec.dissipation = dissipation(u, p);
    rec.source_bound = with_source_bound ? source_bound(u, p) : 0.0;
    const FieldNorms n = norms(u);
    rec.l2 = n.l2;
    rec.h1 = n.h1;
    rec.max_abs = n.max_abs;
    rec.min_abs = n.min_abs;
    rec.degeneracy_measure = degeneracy_measure(u, eps_deg);
    rec.ineq_residual = prev ? check_energy_inequality(*prev, rec) : 0.0;
    return rec;
}

const char* const kDiagnosticsCsvHeader =
    "t,mass,energy,dissipation,source_bound,ineq_residual,l2,h1,max_abs,min_abs,"
    "degeneracy_measure";

void write_csv_header(std::ostream& os) {
    os << kDiagnosticsCsvHeader << '\n';
}

void append_csv_row(std::ostream& os, const DiagnosticsRecord& r) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t,
                  r.mass, r.energy, r.dissipation, r.source_bound, r.ineq_residual, r.l2, r.h1,
                  r.max_abs, r.min_abs, r.degeneracy_measure);
    os << buf;
}

std::vector<DiagnosticsRecord> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("diagnostics CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kDiagnosticsCsvHeader)
        throw std::runtime_error("diagnostics CSV has an unexpected header: " + line);

    std::vector<DiagnosticsRecord> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        DiagnosticsRecord r;
        if (!(row >> r.t >> r.mass >> r.energy >> r.dissipation >> r.source_bound >>
              r.ineq_residual >> r.l2 >> r.h1 >> r.max_abs >> r.min_abs >> r.degeneracy_measure))
            throw std::runtime_error("malformed diagnostics CSV row: " + line);
        out.push_back(r);
    }
    return out;
}

std::vector<DiagnosticsRecord> read_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open diagnostics CSV: " + path);
    return read_csv(is);
}

} // namespace cch
