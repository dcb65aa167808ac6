#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "cch/config.hpp"
#include "cch/errors.hpp"
#include "cch/snapshot.hpp"
#include "cch/spectral.hpp"
#include "test_util.hpp"

using namespace cch;
using namespace cch::test;
namespace sp = cch::spectral;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("cch-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string rich_config_text() {
    return "# full-feature example\n"
           "[domain]\n"
           "dimension = 2\n"
           "points_per_axis = 16\n"
           "dealias_fraction = 1/2\n"
           "\n"
           "[model]\n"
           "gamma = 0.03\n"
           "m = 2\n"
           "beta = 0.5 -0.25\n"
           "phi_coeffs = -1 0 0.5 0 1\n"
           "psi_coeffs = 0 1 0.25\n"
           "theta = 0.001\n"
           "\n"
           "[stepper]\n"
           "scheme = imex_bdf2\n"
           "dt_min = 1e-8\n"
           "dt_max = 5e-3\n"
           "safety = 0.8\n"
           "error_tol = 1e-7\n"
           "\n"
           "[initial]\n"
           "kind = random_smooth\n"
           "amplitude = 0.2\n"
           "mean = 0.4\n"
           "seed = 12345\n"
           "decay = 0.7\n"
           "band_limit = 3\n"
           "\n"
           "[run]\n"
           "t_end = 0.25\n"
           "snapshot_times = 0 0.1 0.25\n"
           "output_dir = results\n"
           "\n"
           "[diagnostics]\n"
           "eps_deg = 0.01\n"
           "tol_ineq = 0.002\n"
           "strict = true\n"
           "source_bound = on\n"
           "record_every = 2\n";
}

}  // namespace

TEST_CASE("empty config text yields the documented defaults") {
    RunConfig c = parse_config("");
    CHECK_EQ(c.domain.dimension, 1);
    CHECK_EQ(c.domain.points_per_axis, 128);
    CHECK_EQ(c.domain.dealias_fraction, Rational{2, 3});
    CHECK_EQ(c.model.gamma, 0.02);
    CHECK_EQ(c.model.m, 1.0);
    CHECK_EQ(c.model.beta, std::vector<double>{0.0});
    CHECK_EQ(c.model.phi_coeffs, (std::vector<double>{-1.0, 0.0, 1.0}));
    CHECK_EQ(c.model.psi_coeffs, (std::vector<double>{0.0, 1.0}));
    CHECK_EQ(c.model.theta, 1e-2);
    CHECK_EQ(c.stepper.scheme, Scheme::ImexBE);
    CHECK_EQ(c.initial.kind, InitialCondition::Kind::Constant);
    CHECK_EQ(c.run.t_end, 1.0);
    CHECK_EQ(c.run.snapshot_count, 50);
    CHECK_EQ(c.diagnostics.eps_deg, 1e-3);
    CHECK_EQ(c.diagnostics.record_every, 1);
    CHECK_FALSE(c.diagnostics.strict);
}

TEST_CASE("rich config parses to the expected values") {
    RunConfig c = parse_config(rich_config_text());
    CHECK_EQ(c.domain.dimension, 2);
    CHECK_EQ(c.domain.points_per_axis, 16);
    CHECK_EQ(c.domain.dealias_fraction, Rational{1, 2});
    CHECK_EQ(c.model.m, 2.0);
    CHECK_EQ(c.model.beta, (std::vector<double>{0.5, -0.25}));
    CHECK_EQ(c.model.phi_coeffs.size(), 5u);
    CHECK_EQ(c.stepper.scheme, Scheme::ImexBDF2);
    CHECK_EQ(c.initial.kind, InitialCondition::Kind::RandomSmooth);
    CHECK_EQ(c.initial.seed, 12345u);
    CHECK_EQ(c.initial.band_limit, 3);
    CHECK_EQ(c.run.snapshot_times, (std::vector<double>{0.0, 0.1, 0.25}));
    CHECK(c.diagnostics.strict);
    CHECK_EQ(c.diagnostics.source_bound, SourceBoundMode::On);
}

TEST_CASE("validation errors carry the dotted key path") {
    auto key_of = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const validation_error& e) {
            return e.key_path();
        }
        return std::string("(no error)");
    };
    CHECK_EQ(key_of("[model]\ngamma = -1\n"), "model.gamma");
    CHECK_EQ(key_of("[model]\nm = 0\n"), "model.m");
    CHECK_EQ(key_of("[model]\ntheta = -0.5\n"), "model.theta");
    CHECK_EQ(key_of("[domain]\npoints_per_axis = 48\n"), "domain.points_per_axis");
    CHECK_EQ(key_of("[stepper]\nsafety = 2\n"), "stepper.safety");
    CHECK_EQ(key_of("[run]\nt_end = 0\n"), "run.t_end");
    CHECK_EQ(key_of("[model]\ngamma = abc\n"), "model.gamma");  // unparsable value
    CHECK_EQ(key_of("[model]\nphi_coeffs = -1 0\n"), "model.phi_coeffs");
}

TEST_CASE("theta = 0 conflicts with a forced source-bound column") {
    const std::string text = "[model]\ntheta = 0\n\n[diagnostics]\nsource_bound = on\n";
    CHECK_THROWS_WITH_AS(parse_config(text),
                         "invalid diagnostics.source_bound: incompatible with theta = 0 "
                         "(denominator has no lower bound)",
                         validation_error);
    // Auto mode simply disables the column instead.
    RunConfig c = parse_config("[model]\ntheta = 0\n");
    CHECK_FALSE(c.diagnostics.source_bound_enabled(c.model.theta));
    CHECK(c.diagnostics.source_bound_enabled(1e-3));
}

TEST_CASE("unknown keys and syntax problems are rejected") {
    CHECK_THROWS_AS(parse_config("[model]\ngamm = 0.1\n"), validation_error);
    CHECK_THROWS_AS(parse_config("[mdoel]\ngamma = 0.1\n"), validation_error);

    try {
        parse_config("[model]\ngamma 0.1\n");  // missing '='
        CHECK(false);
    } catch (const parse_error& e) {
        CHECK_EQ(e.line(), 2);
    }
    try {
        parse_config("[model\ngamma = 0.1\n");  // unterminated section
        CHECK(false);
    } catch (const parse_error& e) {
        CHECK_EQ(e.line(), 1);
    }
    CHECK_THROWS_AS(parse_config("[model]\ngamma = 0.1\ngamma = 0.2\n"), validation_error);
}

TEST_CASE("single-mode wavevector rules") {
    CHECK_THROWS_AS(
        parse_config("[initial]\nkind = single_mode\nwavevector = 1 2\n"),  // 1D config
        validation_error);
    CHECK_THROWS_AS(
        parse_config("[initial]\nkind = single_mode\nwavevector = 100\n"),  // beyond Nyquist
        validation_error);
    CHECK_THROWS_AS(parse_config("[initial]\nkind = single_mode\nwavevector = 0\n"),
                    validation_error);
    RunConfig c = parse_config("[initial]\nkind = single_mode\nwavevector = 3\n");
    CHECK_EQ(c.initial.wavevector, std::vector<int>{3});
}

TEST_CASE("snapshot time lists must be increasing and inside the horizon") {
    CHECK_THROWS_AS(parse_config("[run]\nt_end = 1\nsnapshot_times = 0 2\n"), validation_error);
    CHECK_THROWS_AS(parse_config("[run]\nt_end = 1\nsnapshot_times = 0.5 0.5\n"),
                    validation_error);
    CHECK_THROWS_AS(parse_config("[run]\nsnapshot_times = -0.1 0.5\n"), validation_error);
}

TEST_CASE("resolved snapshot instants") {
    RunSettings r;
    r.t_end = 2.0;
    r.snapshot_count = 5;
    const std::vector<double> t = r.resolved_snapshot_times();
    REQUIRE_EQ(t.size(), 5u);
    CHECK_EQ(t.front(), 0.0);
    CHECK_EQ(t.back(), 2.0);
    CHECK_EQ(t[2], 1.0);

    r.snapshot_count = 1;
    CHECK_EQ(r.resolved_snapshot_times(), std::vector<double>{2.0});
    r.snapshot_count = 0;
    CHECK(r.resolved_snapshot_times().empty());

    r.snapshot_times = {0.25, 1.5};
    CHECK_EQ(r.resolved_snapshot_times(), (std::vector<double>{0.25, 1.5}));
}

TEST_CASE("config round-trips through its canonical serialization") {
    for (const std::string& text :
         {std::string(""), rich_config_text(),
          std::string("[initial]\nkind = single_mode\nwavevector = 2\namplitude = 0.37\n"),
          std::string("[model]\ngamma = 0.123456789012345678\ntheta = 1e-300\n")}) {
        RunConfig c = parse_config(text);
        const std::string canon = serialize_config(c);
        RunConfig back = parse_config(canon);
        CHECK(back == c);
        CHECK_EQ(serialize_config(back), canon);  // canonical form is a fixed point
    }
}

TEST_CASE("initial field: constant and single mode are exact") {
    DomainSpec d = domain_1d(32);
    InitialCondition ic;
    ic.kind = InitialCondition::Kind::Constant;
    ic.value = -0.75;
    SpectralField f = build_initial_field(ic, d);
    CHECK_EQ(f.coeffs[0], std::complex<double>(-0.75, 0.0));
    for (std::size_t i = 1; i < f.coeffs.size(); ++i)
        CHECK_EQ(f.coeffs[i], std::complex<double>(0.0, 0.0));

    ic.kind = InitialCondition::Kind::SingleMode;
    ic.amplitude = 0.5;
    ic.mean = 0.2;
    ic.wavevector = {3};
    f = build_initial_field(ic, d);
    CHECK_EQ(f.coeffs[0], std::complex<double>(0.2, 0.0));
    CHECK_EQ(f.coeffs[mode_index(d, 3)], std::complex<double>(0.25, 0.0));
    CHECK_EQ(f.coeffs[mode_index(d, -3)], std::complex<double>(0.25, 0.0));
    PhysicalField phys = sp::inverse(f);
    const double h = d.grid_spacing();
    for (int j = 0; j < d.points_per_axis; ++j)
        CHECK(std::abs(phys.values[j] - (0.2 + 0.5 * std::cos(3.0 * h * j))) < 1e-14);

    DomainSpec d2 = domain_2d(16);
    ic.wavevector = {2, -3};
    f = build_initial_field(ic, d2);
    CHECK_EQ(f.coeffs[mode_index(d2, 2, -3)], std::complex<double>(0.25, 0.0));
    CHECK_EQ(f.coeffs[mode_index(d2, -2, 3)], std::complex<double>(0.25, 0.0));
}

TEST_CASE("random-smooth initial fields are deterministic and band-limited") {
    DomainSpec d = domain_1d(64);
    InitialCondition ic;
    ic.kind = InitialCondition::Kind::RandomSmooth;
    ic.amplitude = 0.3;
    ic.mean = 0.1;
    ic.seed = 777;
    ic.decay = 0.5;
    ic.band_limit = 6;

    SpectralField a = build_initial_field(ic, d);
    SpectralField b = build_initial_field(ic, d);
    CHECK_EQ(max_coeff_diff(a, b), 0.0);  // bitwise deterministic

    ic.seed = 778;
    SpectralField other = build_initial_field(ic, d);
    CHECK(max_coeff_diff(a, other) > 0.0);

    CHECK_EQ(a.coeffs[0], std::complex<double>(0.1, 0.0));
    for_each_mode(d, [&](std::size_t idx, int kx, int) {
        if (std::abs(kx) > 6) {
            CHECK_EQ(a.coeffs[idx], std::complex<double>(0.0, 0.0));
        } else if (kx != 0) {
            // Conjugate symmetry and the decay envelope.
            CHECK_EQ(a.coeffs[idx], std::conj(a.coeffs[mode_index(d, -kx)]));
            CHECK(std::abs(a.coeffs[idx]) <= 0.3 * std::exp(-0.5 * std::abs(kx)) + 1e-15);
        }
    });

    // Realizable as a real field.
    CHECK_NOTHROW(sp::inverse(a));

    // band_limit 0 falls back to the dealias cutoff.
    ic.band_limit = 0;
    SpectralField full = build_initial_field(ic, d);
    bool has_high = false;
    for_each_mode(d, [&](std::size_t idx, int kx, int) {
        if (std::abs(kx) > 6 && std::abs(full.coeffs[idx]) > 0.0) has_high = true;
        if (std::abs(kx) > d.dealias_cutoff()) CHECK_EQ(std::abs(full.coeffs[idx]), 0.0);
    });
    CHECK(has_high);
}

TEST_CASE("file-backed initial condition loads a snapshot") {
    TempDir tmp;
    DomainSpec d = domain_1d(16);
    PhysicalField u0 = sample(d, [](double x, double) { return 0.3 + 0.1 * std::sin(x); });
    const fs::path snap = tmp.path / "state.bin";
    write_snapshot(snap, u0, 0.0);

    InitialCondition ic;
    ic.kind = InitialCondition::Kind::File;
    ic.path = snap.string();
    SpectralField f = build_initial_field(ic, d);
    PhysicalField back = sp::inverse(f);
    for (std::size_t j = 0; j < u0.values.size(); ++j)
        CHECK(std::abs(back.values[j] - u0.values[j]) < 1e-14);

    DomainSpec other = domain_1d(32);
    CHECK_THROWS_AS(build_initial_field(ic, other), validation_error);
}

TEST_CASE("relative snapshot paths resolve against the config directory") {
    TempDir tmp;
    DomainSpec d = domain_1d(16);
    write_snapshot(tmp.path / "u0.bin", sample(d, [](double, double) { return 0.5; }), 0.0);

    const fs::path cfg_path = tmp.path / "run.ini";
    std::ofstream os(cfg_path);
    os << "[domain]\npoints_per_axis = 16\n\n[initial]\nkind = file\npath = u0.bin\n";
    os.close();

    RunConfig c = load_config_file(cfg_path);
    CHECK_EQ(c.initial.path, (tmp.path / "u0.bin").string());
    SpectralField f = build_initial_field(c.initial, c.domain);
    CHECK(std::abs(f.coeffs[0].real() - 0.5) < 1e-15);
}

TEST_CASE("snapshot binary format round-trips bit-exactly") {
    TempDir tmp;
    for (int dim : {1, 2}) {
        DomainSpec d = dim == 1 ? domain_1d(32) : domain_2d(16);
        PhysicalField f = sp::inverse(random_band_limited(d, 5, 31 + dim, 0.9, -0.2));
        f.values[3] = 1e-300;  // denormal-ish edge
        const fs::path path = tmp.path / ("snap" + std::to_string(dim) + ".bin");
        write_snapshot(path, f, 0.625);
        Snapshot s = load_snapshot(path);
        CHECK_EQ(s.time, 0.625);
        CHECK_EQ(s.field.domain.dimension, dim);
        CHECK_EQ(s.field.domain.points_per_axis, d.points_per_axis);
        REQUIRE_EQ(s.field.values.size(), f.values.size());
        for (std::size_t i = 0; i < f.values.size(); ++i)
            CHECK_EQ(s.field.values[i], f.values[i]);
    }
}

TEST_CASE("snapshot loader rejects corrupted files") {
    TempDir tmp;
    DomainSpec d = domain_1d(16);
    const fs::path good = tmp.path / "good.bin";
    write_snapshot(good, PhysicalField(d), 0.0);

    SUBCASE("bad magic") {
        auto bytes = [&] {
            std::ifstream is(good, std::ios::binary);
            return std::string(std::istreambuf_iterator<char>(is), {});
        }();
        bytes[0] = 'X';
        const fs::path bad = tmp.path / "bad.bin";
        std::ofstream os(bad, std::ios::binary);
        os << bytes;
        os.close();
        CHECK_THROWS(load_snapshot(bad));
    }
    SUBCASE("truncated payload") {
        auto bytes = [&] {
            std::ifstream is(good, std::ios::binary);
            return std::string(std::istreambuf_iterator<char>(is), {});
        }();
        bytes.resize(bytes.size() - 8);
        const fs::path bad = tmp.path / "short.bin";
        std::ofstream os(bad, std::ios::binary);
        os << bytes;
        os.close();
        CHECK_THROWS(load_snapshot(bad));
    }
    SUBCASE("missing file") {
        CHECK_THROWS(load_snapshot(tmp.path / "absent.bin"));
    }
}

TEST_CASE("snapshot text export matches the grid shape") {
    TempDir tmp;

    DomainSpec d1 = domain_1d(8);
    Snapshot s1{sample(d1, [](double x, double) { return std::cos(x); }), 0.0};
    const fs::path txt1 = tmp.path / "field1d.csv";
    export_snapshot_text(s1, txt1, "csv");
    std::ifstream is1(txt1);
    std::string line;
    REQUIRE(std::getline(is1, line));
    CHECK_EQ(line, "x,u");  // column header
    int rows = 0;
    while (std::getline(is1, line))
        if (!line.empty()) ++rows;
    CHECK_EQ(rows, 8);

    DomainSpec d2 = domain_2d(8);
    Snapshot s2{sample(d2, [](double x, double y) { return std::sin(x + y); }), 0.5};
    const fs::path txt2 = tmp.path / "field2d.txt";
    export_snapshot_text(s2, txt2, "txt");
    std::ifstream is2(txt2);
    rows = 0;
    int cols = -1;
    while (std::getline(is2, line)) {
        if (line.empty() || line[0] == '#') continue;
        ++rows;
        int c = 1;
        for (char ch : line)
            if (ch == ' ') ++c;
        if (cols < 0) cols = c;
        CHECK_EQ(c, cols);
    }
    CHECK_EQ(rows, 8);
    CHECK_EQ(cols, 8);
}
