// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cascade/cli.hpp"
#include "cascade/config.hpp"
#include "cascade/io.hpp"
#include "cascade/norms.hpp"

using namespace cascade;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

SpectralField gaussian_field(const GridSpec& g, RngStream& rng) {
    SpectralField u(g);
    const std::uint64_t cell = rng.take_cell();
    for (std::size_t r = 0; r < g.mode_count(); ++r) {
        const auto [a, b] = rng.gaussian_pair(cell, r);
        u.coeffs()[r] = Complex(a, b);
    }
    return u;
}

// 1. Round trip and discrete Parseval on retained modes.
Outcome transform_exactness() {
    double worst = 0.0;
    RngStream rng(2024, 1);
    for (auto [n, N] : {std::pair{1, 64}, std::pair{2, 32}}) {
        const GridSpec g(n, N, N / 2);
        const SineTransform tr(g);
        for (int trial = 0; trial < 10; ++trial) {
            const SpectralField u = gaussian_field(g, rng);
            const PhysicalField p = tr.to_physical(u);
            const SpectralField back = tr.to_spectral(p);
            for (std::size_t r = 0; r < g.mode_count(); ++r)
                worst = std::max(worst, std::abs(back.coeffs()[r] - u.coeffs()[r]));
            const double e = sobolev_norm_sq(u, 0.0);
            worst = std::max(worst, std::abs(lattice_inner(p, p) - e) / e);
        }
    }
    return {worst <= 1e-12, "max error " + num(worst)};
}

// 2. ||u||_l^2 <= (||u||_0^2)^{1-l/m} (||u||_m^2)^{l/m}.
Outcome interpolation() {
    const GridSpec g(1, 64, 32);
    RngStream rng(7, 2);
    double worst = INFINITY;
    for (int trial = 0; trial < 1000; ++trial) {
        SpectralField u = gaussian_field(g, rng);
        // vary the spectral slope so both flat and steep spectra appear
        const double q = 0.05 * (trial % 60);
        for (std::size_t r = 0; r < g.mode_count(); ++r) u.coeffs()[r] *= std::pow(g.mode_norm_sq()[r], -0.5 * q);
        for (auto [l, m] : {std::pair{1.0, 2.0}, std::pair{1.0, 3.0}, std::pair{2.0, 3.0}}) {
            const double rhs = std::pow(sobolev_norm_sq(u, 0.0), 1.0 - l / m) * std::pow(sobolev_norm_sq(u, m), l / m);
            worst = std::min(worst, (rhs - sobolev_norm_sq(u, l)) / rhs);
        }
    }
    return {worst >= -1e-12, "min relative slack " + num(worst)};
}

EnsembleTask stationary_setting(bool nonlinear) {
    const GridSpec g(1, 64, 32);
    EnsembleTask t;
    t.spec = NoiseSpec::parse(g, "band:1,1,1");
    t.params.nu = 0.5;
    t.params.dt = 0.01;
    t.params.T = 250.0 / t.params.nu;  // 200 slow units after a 20% burn-in
    t.params.record_every = 10;
    t.params.seed = 31337;
    t.params.nonlinear = nonlinear;
    t.members = 16;
    t.recorder.shells = true;
    t.u0 = zero_field(g);
    return t;
}

// 3. Linear OU spectrum: E|u_d|^2 = b_d^2 / |d|^2 and E||u||_1^2 = B_0.
Outcome linear_spectrum() {
    const EnsembleTask t = stationary_setting(false);
    const EnsembleRun run = run_ensemble(t);
    const double b0 = t.spec.bk_sum(0.0);
    std::ostringstream d;
    bool ok = std::abs(b0 - 3.0) < 1e-12;
    for (int mode = 1; mode <= 3; ++mode) {
        double acc = 0.0;
        std::size_t count = 0;
        for (const auto& s : run.streams) {
            for (const auto& r : s.records) {
                if (r.tau < 0.2 * 250.0 - 1e-9) continue;
                acc += r.shells[static_cast<std::size_t>(mode - 1)];
                ++count;
            }
        }
        const double emp = acc / static_cast<double>(count);
        const double oracle = 1.0 / (mode * mode);
        const double rel = std::abs(emp - oracle) / oracle;
        ok = ok && rel <= 0.05;
        d << "E|u_" << mode << "|^2 = " << num(emp) << " vs " << num(oracle) << "; ";
    }
    const MomentEstimate h1 = stationary_moment(run.streams, 1.0, 0.2);
    const double rel = std::abs(h1.mean - b0) / b0;
    ok = ok && rel <= 0.05;
    d << "E||u||_1^2 = " << num(h1.mean) << " vs B_0 = " << num(b0);
    return {ok, d.str()};
}

// 4. Balance relation in the full nonlinear run. The 2-sigma batch-means
// band must itself fit inside the 10% tolerance.
Outcome balance() {
    const EnsembleTask t = stationary_setting(true);
    const EnsembleRun run = run_ensemble(t);
    const BalanceReport r = balance_check(run.streams, 0.2, t.spec.bk_sum(0.0), 10.0);
    const bool ok = !r.degenerate && !r.short_window && std::abs(r.relative_residual) <= 0.10 &&
                    2.0 * r.se <= 0.10 * r.b0;
    return {ok, "<||u||_1^2> = " + num(r.avg_h1_sq) + " +- " + num(r.se) + " (B_0 = " + num(r.b0) +
                    ", residual " + num(r.relative_residual) + ")"};
}

// 5. Strang and Euler-Maruyama on one Brownian path converge to each other.
Outcome oracle_equivalence() {
    const GridSpec g(1, 32, 16);
    const NoiseSpec spec = NoiseSpec::parse(g, "band:1,1,1");
    const double nu = 0.2;
    const double dt0 = 0.01;
    const int levels = 5;
    const std::uint64_t finest = 1u << (levels - 1);
    const SpectralField u0 = policy_initial(g, nu, InitialConstraint{});
    std::vector<ScalingPoint> pts;
    std::ostringstream d;
    for (int l = 0; l < levels; ++l) {
        double sq = 0.0;
        const int paths = 8;
        for (int p = 0; p < paths; ++p) {
            SimParams sp;
            sp.nu = nu;
            sp.dt = dt0 / static_cast<double>(1u << l);
            sp.T = 1.0;
            sp.seed = 99;
            sp.stream_id = static_cast<std::uint64_t>(p);
            sp.path_refinement = finest >> l;
            sp.scheme = Scheme::strang;
            const SpectralField a = run_trajectory(u0, spec, sp).u;
            sp.scheme = Scheme::em;
            SpectralField b = run_trajectory(u0, spec, sp).u;
            b *= -1.0;
            b += a;
            sq += sobolev_norm_sq(b, 0.0);
        }
        const double rms = std::sqrt(sq / paths);
        pts.push_back({dt0 / static_cast<double>(1u << l), rms, 0.0});
        d << num(rms) << (l + 1 < levels ? ", " : "");
    }
    // fit_exponent regresses on log(1/x); the convergence order is -alpha
    const double order = -fit_exponent(pts).alpha;
    bool decreasing = true;
    for (std::size_t i = 1; i < pts.size(); ++i) decreasing = decreasing && pts[i].q < pts[i - 1].q;
    return {decreasing && order >= 0.5, "||diff||_0 = [" + d.str() + "], order " + num(order)};
}

const char* kOccupationConfig = R"(
[grid]
n = 1
N = 64
D = 32
[noise]
profile = band:1,1,1
[sim]
nu = 0.1
T_slow = 1
[ensemble]
M = 128
base_seed = 20240611
[experiment]
window_start = 0
window_length = 1
[occupation]
chi_factors = 0.05,0.1,0.2
gamma_factor = 2
tau0 = 0
tau = 1
)";

fs::path scratch_root() {
    const fs::path p = fs::temp_directory_path() / "cascade_lab_acceptance";
    fs::create_directories(p);
    return p;
}

fs::path only_run_dir(const fs::path& root) {
    for (const auto& e : fs::directory_iterator(root))
        if (e.is_directory()) return e.path();
    throw Error("no run directory under " + root.string());
}

// 6. Occupation-time inequality, through the CLI (simulate, then occupation).
Outcome occupation() {
    const fs::path root = scratch_root() / "occupation";
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path cfg = root / "occupation.ini";
    atomic_write(cfg, kOccupationConfig);
    std::ostringstream out, err;
    int code = run_command({"simulate", "--config", cfg.string(), "--out", (root / "runs").string()}, out, err);
    if (code != 0) return {false, "simulate exited " + std::to_string(code) + ": " + err.str()};
    const fs::path run = only_run_dir(root / "runs");
    std::ostringstream occ;
    code = run_command({"occupation", run.string()}, occ, err);
    std::string detail;
    std::istringstream lines(read_file(run / "occupation_nu_0.jsonl"));
    for (std::string line; std::getline(lines, line);) {
        const Json j = Json::parse(line);
        if (j["record"] != "occupation") continue;
        detail += "chi=" + num(j["chi"].get<double>()) + ": " + num(j["lhs_estimate"].get<double>()) + " <= " +
                  num(j["rhs_bound"].get<double>()) + " + 2*" + num(j["lhs_se"].get<double>()) + "; ";
    }
    return {code == 0, detail};
}

SweepPlan cascade_plan() {
    SweepPlan p;
    p.grid = GridSpec(1, 64, 32);
    p.noise = NoiseProfile::parse("band:1,1,1");
    p.nu_grid = {0.4, 0.2, 0.1, 0.05, 0.025};
    p.sim.dt = 0.01;
    p.sim.record_every = 10;
    p.sim.seed = 4242;
    p.members = 32;
    p.observables = {Observable::parse("time_avg_sobolev(2)"), Observable::parse("sup_cm(2)"),
                     Observable::parse("sup_inf_norm")};
    p.window_start = 1.0;
    p.window_length = 1.0;
    p.slack = 0.5;
    return p;
}

const SweepReport& cascade_sweep() {
    static const SweepReport rep = nu_sweep(cascade_plan());
    return rep;
}

std::string list(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
    return s + "]";
}

// 7. Means of the time-averaged H^2 norm grow as nu decreases, 0 < alpha <= 2.5.
Outcome cascade_trend() {
    const ObservableVerdict& v = cascade_sweep().verdicts[0];
    const double alpha = v.fit ? v.fit->alpha : NAN;
    const bool ok = v.monotone_means && v.fit && alpha > 0.0 && alpha <= 2.5;
    return {ok, "means " + list(v.means) + ", alpha " + num(alpha)};
}

// 8. Medians of the windowed C^2 norm grow as nu decreases.
Outcome cm_trend() {
    const ObservableVerdict& v = cascade_sweep().verdicts[1];
    return {v.monotone_medians, "medians " + list(v.medians)};
}

// 9. Medians of sup |u|_inf stay within a factor 3 across the sweep.
Outcome sup_uniformity() {
    const ObservableVerdict& v = cascade_sweep().verdicts[2];
    std::string flags;
    for (const auto& e : v.exp_moments) flags += e.stable ? "s" : "u";
    return {v.median_spread < 3.0,
            "medians " + list(v.medians) + ", spread " + num(v.median_spread) + ", exp-moment stability " + flags};
}

// 10. Re-running with the same config and seed gives byte-identical CSVs.
Outcome determinism() {
    const fs::path root = scratch_root() / "determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path cfg = root / "occupation.ini";
    atomic_write(cfg, kOccupationConfig);
    std::vector<fs::path> runs;
    for (const char* sub : {"a", "b"}) {
        std::ostringstream out, err;
        const int code = run_command({"simulate", "--config", cfg.string(), "--out", (root / sub).string()}, out, err);
        if (code != 0) return {false, "simulate failed: " + err.str()};
        runs.push_back(only_run_dir(root / sub));
    }
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(runs[0])) {
        if (e.path().extension() != ".csv") continue;
        const fs::path other = runs[1] / fs::relative(e.path(), runs[0]);
        if (!fs::exists(other) || read_file(e.path()) != read_file(other))
            return {false, "differs: " + fs::relative(e.path(), runs[0]).string()};
        ++files;
    }
    // the in-memory sweep must match a serial re-run as well
    SweepPlan p = cascade_plan();
    p.nu_grid = {0.4, 0.2, 0.1};
    p.members = 4;
    std::vector<std::string> first, second;
    nu_sweep(p, Execution::parallel, [&](std::size_t, const EnsembleResult& r) {
        for (const auto& s : r.run.streams) first.push_back(stream_csv(s));
    });
    nu_sweep(p, Execution::serial, [&](std::size_t, const EnsembleResult& r) {
        for (const auto& s : r.run.streams) second.push_back(stream_csv(s));
    });
    return {files == 128 && first == second,
            std::to_string(files) + " CSV files identical, sweep CSVs " + (first == second ? "identical" : "differ")};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "transform exactness", 1.0, transform_exactness},
        {2, "interpolation inequality", 5.0, interpolation},
        {3, "linear stationary spectrum", 120.0, linear_spectrum},
        {4, "balance relation", 300.0, balance},
        {5, "Strang vs Euler-Maruyama on a shared path", 60.0, oracle_equivalence},
        {6, "occupation-time inequality", 600.0, occupation},
        {7, "cascade trend of time-averaged H^2 norm", 1800.0, cascade_trend},
        {8, "C^2 norm trend", 1800.0, cm_trend},
        {9, "sup-norm nu-uniformity", 1800.0, sup_uniformity},
        {10, "determinism", 600.0, determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_budget = secs <= c.budget_s;
        const bool pass = o.pass && in_budget;
        failed += pass ? 0 : 1;
        std::cout << "criterion " << c.id << " " << (pass ? "PASS" : "FAIL") << "  " << c.name << "  (" << o.detail
                  << ")  [" << num(secs) << " s / " << num(c.budget_s) << " s" << (in_budget ? "" : ", over budget")
                  << "]" << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
