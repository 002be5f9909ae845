// Randomized invariants over generated grids and fields.
#include <doctest.h>

#include <numbers>

#include "cascade/config.hpp"
#include "cascade/norms.hpp"
#include "cascade/snapshot.hpp"
#include "support.hpp"

using namespace cascade;
using testsupport::Gen;
using testsupport::max_diff;

namespace {
constexpr int kCases = 60;
}

TEST_CASE("transform: round trip, Parseval and linearity on random grids") {
    Gen gen(101);
    for (int i = 0; i < kCases; ++i) {
        const GridSpec g = gen.grid();
        const SineTransform tr(g);
        const SpectralField u = gen.field(g, true);
        const SpectralField v = gen.field(g, true);
        const PhysicalField pu = tr.to_physical(u);
        const double scale = std::max(1.0, sobolev_norm(u, 0.0));
        CHECK(max_diff(tr.to_spectral(pu).coeffs(), u.coeffs()) < 1e-12 * scale);
        CHECK(std::abs(lattice_inner(pu, pu) - sobolev_norm_sq(u, 0.0)) < 1e-12 * scale * scale);
        const Complex a(gen.normal(), gen.normal());
        const PhysicalField lin = tr.to_physical(a * u + v);
        const PhysicalField pv = tr.to_physical(v);
        for (std::size_t j = 0; j < g.lattice_size(); ++j)
            CHECK(std::abs(lin[j] - (a * pu[j] + pv[j])) < 1e-11 * (std::abs(a) + 1) * scale);
    }
}

TEST_CASE("norms: ordering, interpolation, homogeneity and shells") {
    Gen gen(202);
    for (int i = 0; i < kCases; ++i) {
        const GridSpec g = gen.grid();
        const SpectralField u = gen.field(g, true);
        const double m0 = sobolev_norm(u, 0.0), m1 = sobolev_norm(u, 1.0), m2 = sobolev_norm(u, 2.0);
        CHECK(m0 <= m1 * (1 + 1e-14));
        CHECK(m1 <= m2 * (1 + 1e-14));
        CHECK(m1 * m1 <= m0 * m2 * (1 + 1e-12));
        const double lam = gen.uniform(0.1, 10.0);
        CHECK(sobolev_norm(lam * u, 1.5) == doctest::Approx(lam * sobolev_norm(u, 1.5)).epsilon(1e-13));
        const double theta = gen.uniform(0.0, 6.0);
        const SpectralField rotated = std::polar(1.0, theta) * u;
        CHECK(sup_norm(rotated) == doctest::Approx(sup_norm(u)).epsilon(1e-12));
        double l1 = 0.0;
        for (const Complex& c : u.coeffs()) l1 += std::abs(c);
        CHECK(sup_norm(u) <= std::pow(2.0 / std::numbers::pi, 0.5 * g.dim()) * l1 * (1 + 1e-12));
        CHECK(cm_norm(u, 1) >= sup_norm(u) * (1 - 1e-14));
        double shells = 0.0;
        for (const Shell& s : spectrum_shells(u)) shells += s.energy;
        CHECK(shells == doctest::Approx(m0 * m0).epsilon(1e-12));
    }
}

TEST_CASE("snapshots round trip on random grids") {
    Gen gen(303);
    for (int i = 0; i < kCases; ++i) {
        const GridSpec g = gen.grid();
        const SpectralField u = gen.field(g, true);
        CHECK(decode_snapshot(encode_snapshot(u)) == u);
        const SpectralField single = decode_snapshot(encode_snapshot(u, SnapshotDtype::complex64));
        CHECK(max_diff(single.coeffs(), u.coeffs()) <= 1e-6 * std::max(1.0, sobolev_norm(u, 0.0)));
    }
}

TEST_CASE("nonlinear flow: lattice modulus kept, truncated energy never grows") {
    Gen gen(404);
    for (int i = 0; i < kCases / 2; ++i) {
        const GridSpec g = gen.grid();
        const SineTransform tr(g);
        const SpectralField u = gen.field(g, true);
        PhysicalField p = tr.to_physical(u);
        const PhysicalField before = p;
        phase_rotate_lattice(p, gen.uniform(0.0, 2.0));
        for (std::size_t j = 0; j < g.lattice_size(); ++j)
            CHECK(std::abs(std::abs(p[j]) - std::abs(before[j])) < 1e-13 * (1 + std::abs(before[j])));
        CHECK(sobolev_norm(tr.to_spectral(p), 0.0) <= sobolev_norm(u, 0.0) * (1 + 1e-12));
    }
}

TEST_CASE("free OU flow contracts every Sobolev norm") {
    Gen gen(505);
    for (int i = 0; i < kCases; ++i) {
        const GridSpec g = gen.grid();
        const NoiseSpec none = NoiseSpec::parse(g, "zero");
        const SpectralField u = gen.field(g, true);
        RngStream rng(1, 0);
        const SpectralField v = ou_exact_step(u, none, gen.uniform(0.01, 1.0), gen.uniform(0.01, 1.0), rng);
        for (double m : {0.0, 1.0, 2.0}) CHECK(sobolev_norm(v, m) <= sobolev_norm(u, m));
    }
}

TEST_CASE("config emit/parse is the identity on random configs") {
    Gen gen(606);
    const char* profiles[] = {"band:1,1,1", "power:p=1.5", "exp:a=0.7", "single:d=2", "zero"};
    const char* observables[] = {"time_avg_sobolev(2)", "sup_cm(3)", "sup_inf_norm", "sup_sobolev(1)"};
    for (int i = 0; i < kCases; ++i) {
        RunConfig c;
        c.n = gen.integer(1, 3);
        c.N = gen.integer(4, 32);
        c.D = gen.integer(2, c.N);
        c.noise_profile = profiles[gen.integer(0, 4)];
        c.nu_grid.clear();
        double nu = gen.uniform(0.5, 1.0);
        for (int k = gen.integer(1, 5); k > 0; --k) {
            c.nu_grid.push_back(nu);
            nu *= gen.uniform(0.3, 0.9);
        }
        if (gen.integer(0, 1)) c.dt = gen.uniform(1e-4, 1e-2);
        c.T_slow = gen.uniform(1.0, 50.0);
        c.record_every = gen.integer(1, 50);
        c.scheme = gen.integer(0, 1) ? Scheme::em : Scheme::strang;
        c.nonlinear = gen.integer(0, 1);
        c.members = static_cast<std::size_t>(gen.integer(2, 500));
        c.base_seed = static_cast<std::uint64_t>(gen.integer(0, 1 << 30)) << 20;
        c.observables = {observables[gen.integer(0, 3)]};
        c.kappa = gen.uniform(0.0, 0.1);
        c.slack = gen.uniform(0.0, 1.0);
        c.shells = gen.integer(0, 1);
        c.shared_slow_path = gen.integer(0, 1);
        c.chi_factors = {gen.uniform(0.01, 0.5)};
        c.initial = gen.integer(0, 1) ? "zero" : "policy";
        const RunConfig back = parse_config(emit_config(c));
        CHECK(back == c);
    }
}
