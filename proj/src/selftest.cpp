#include "cascade/selftest.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "cascade/config.hpp"
#include "cascade/norms.hpp"
#include "cascade/snapshot.hpp"

namespace cascade {

namespace {

SpectralField random_field(const GridSpec& g, std::uint64_t seed, double decay) {
    return smooth_random_field(g, decay, RngStream(seed, 7));
}

std::string sci(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

SelftestResult transform_roundtrip() {
    double worst = 0.0;
    for (auto [n, N, D] : {std::array{1, 64, 32}, std::array{2, 32, 16}}) {
        const GridSpec g(n, N, D);
        const SineTransform tr(g);
        const SpectralField u = random_field(g, 11, 0.0);
        const PhysicalField p = tr.to_physical(u);
        const SpectralField back = tr.to_spectral(p);
        double err = 0.0;
        for (std::size_t i = 0; i < g.mode_count(); ++i) err = std::max(err, std::abs(back.coeffs()[i] - u.coeffs()[i]));
        const double parseval = std::abs(lattice_inner(p, p) - sobolev_norm_sq(u, 0.0));
        worst = std::max({worst, err, parseval});
    }
    return {"transform round trip and Parseval", worst < 1e-12, "max error " + sci(worst)};
}

SelftestResult interpolation() {
    const GridSpec g(1, 64, 32);
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const SpectralField u = random_field(g, 100 + s, 0.5 + 0.02 * static_cast<double>(s));
        for (auto [l, m] : {std::pair{1.0, 2.0}, std::pair{1.0, 3.0}, std::pair{2.0, 3.0}}) {
            const double lhs = sobolev_norm_sq(u, l);
            const double rhs = std::pow(sobolev_norm_sq(u, 0.0), 1.0 - l / m) * std::pow(sobolev_norm_sq(u, m), l / m);
            worst = std::min(worst, (rhs - lhs) / std::max(rhs, 1e-300));
        }
    }
    return {"interpolation inequality", worst >= -1e-12, "min slack " + sci(worst)};
}

SelftestResult poincare() {
    const GridSpec g(2, 16, 8);
    bool ok = true;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const SpectralField u = random_field(g, 300 + s, 1.0);
        ok = ok && sobolev_norm(u, 0.0) <= sobolev_norm(u, 1.0) && sobolev_norm(u, 1.0) <= sobolev_norm(u, 2.0);
    }
    return {"Poincare ordering of Sobolev norms", ok, ""};
}

SelftestResult philox_kat() {
    const auto a = philox4x32({0, 0, 0, 0}, {0, 0});
    const auto b = philox4x32({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u});
    const bool ok = a == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u} &&
                    b == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu};
    return {"Philox4x32-10 known answers", ok, ""};
}

SelftestResult normal_quantile_check() {
    double worst = 0.0;
    for (double p : {1e-10, 1e-3, 0.025, 0.3, 0.5, 0.7, 0.975, 0.999}) {
        const double x = normal_quantile(p);
        const double back = 0.5 * std::erfc(-x / std::sqrt(2.0));
        worst = std::max(worst, std::abs(back - p) / p);
    }
    return {"inverse normal CDF", worst < 1e-12, "max rel error " + sci(worst)};
}

SelftestResult ou_decay() {
    const GridSpec g(1, 16, 8);
    const NoiseSpec spec = NoiseSpec::parse(g, "zero");
    const double nu = 0.3;
    SpectralField u = single_mode_field(g, {2}, Complex(1.0, 0.0));
    const double h = std::log(2.0) / (nu * 4.0);
    RngStream rng(1, 0);
    u = ou_exact_step(u, spec, nu, h, rng);
    const double err = std::abs(u.at({2}) - Complex(0.5, 0.0));
    return {"OU half-life of a free mode", err < 1e-14, "error " + sci(err)};
}

SelftestResult phase_modulus() {
    const GridSpec g(1, 32, 16);
    const SineTransform tr(g);
    PhysicalField p = tr.to_physical(random_field(g, 5, 1.0));
    const PhysicalField before = p;
    phase_rotate_lattice(p, 0.37);
    double err = 0.0;
    for (std::size_t i = 0; i < p.values().size(); ++i)
        err = std::max(err, std::abs(std::abs(p.values()[i]) - std::abs(before.values()[i])));
    return {"phase rotation keeps the lattice modulus", err < 1e-14, "error " + sci(err)};
}

SelftestResult checkpoint_resume() {
    const GridSpec g(1, 32, 16);
    const NoiseSpec spec = NoiseSpec::parse(g, "band:1,1,1");
    SimParams p;
    p.nu = 0.2;
    p.dt = 0.01;
    p.T = 0.5;
    p.seed = 42;
    const SpectralField u0 = policy_initial(g, p.nu, InitialConstraint{});
    const TrajectoryState full = run_trajectory(u0, spec, p);
    TrajectoryState half = resume_trajectory(initial_state(u0, p), spec, p, {}, 20);
    const auto bytes = encode_checkpoint(half, p.dt);
    const TrajectoryState resumed = resume_trajectory(decode_checkpoint(bytes, p.dt), spec, p);
    return {"checkpoint resume is bit-exact", resumed.u == full.u && resumed.step_index == full.step_index, ""};
}

SelftestResult serial_parallel() {
    const GridSpec g(1, 16, 8);
    EnsembleTask t;
    t.spec = NoiseSpec::parse(g, "band:1,1,1");
    t.params.nu = 0.2;
    t.params.dt = 0.02;
    t.params.T = 1.0;
    t.params.seed = 9;
    t.params.record_every = 5;
    t.members = 4;
    t.u0 = zero_field(g);
    const EnsembleRun a = run_ensemble(t, Execution::serial);
    const EnsembleRun b = run_ensemble(t, Execution::parallel);
    bool ok = a.streams.size() == b.streams.size();
    for (std::size_t i = 0; ok && i < a.streams.size(); ++i) {
        const auto& ra = a.streams[i].records;
        const auto& rb = b.streams[i].records;
        ok = ra.size() == rb.size();
        for (std::size_t k = 0; ok && k < ra.size(); ++k) ok = ra[k].norms == rb[k].norms && ra[k].sup == rb[k].sup;
    }
    return {"serial and parallel ensembles agree", ok, ""};
}

SelftestResult snapshot_roundtrip() {
    const GridSpec g(2, 16, 8);
    const SpectralField u = random_field(g, 77, 1.0);
    return {"snapshot round trip", decode_snapshot(encode_snapshot(u)) == u, ""};
}

SelftestResult config_roundtrip() {
    const std::string text =
        "[grid]\nn = 1\nN = 64\nD = 32\n[noise]\nprofile = band:1,1,1\n[sim]\nnu = 0.1\n[ensemble]\nbase_seed = 1\n";
    const RunConfig c = parse_config(text);
    return {"config round trip", parse_config(emit_config(c)) == c, ""};
}

SelftestResult fit_exact() {
    std::vector<ScalingPoint> pts;
    for (double nu : {0.4, 0.2, 0.1, 0.05}) pts.push_back({nu, 3.0 * std::pow(nu, -2.0), 0.0});
    const ScalingFit f = fit_exponent(pts);
    const double err = std::abs(f.alpha - 2.0);
    return {"exponent fit on exact power law", err < 1e-12 && std::abs(f.r2 - 1.0) < 1e-12, "alpha error " + sci(err)};
}

}  // namespace

std::vector<SelftestResult> run_selftest() {
    const std::vector<std::function<SelftestResult()>> checks{
        transform_roundtrip, interpolation, poincare, philox_kat, normal_quantile_check, ou_decay,
        phase_modulus, checkpoint_resume, serial_parallel, snapshot_roundtrip, config_roundtrip, fit_exact,
    };
    std::vector<SelftestResult> out;
    for (const auto& check : checks) {
        try {
            out.push_back(check());
        } catch (const std::exception& e) {
            out.push_back({"(check threw)", false, e.what()});
        }
    }
    return out;
}

}  // namespace cascade
