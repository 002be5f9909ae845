#include "cascade/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "cascade/config.hpp"
#include "cascade/io.hpp"
#include "cascade/selftest.hpp"

namespace cascade {

namespace fs = std::filesystem;

namespace {

struct Common {
    std::string config;
    std::string out;
    std::vector<std::string> overrides;
    int threads = 0;
};

void add_common(CLI::App* sub, Common& c, bool config_required) {
    auto* opt = sub->add_option("--config", c.config, "Run configuration file");
    if (config_required) opt->required();
    sub->add_option("--out", c.out, "Output root (default: output.dir from the config)");
    sub->add_option("--override", c.overrides, "section.key=value, applied after the file")->take_all();
    sub->add_option("--threads", c.threads, "OpenMP threads (fallback: CASCADE_LAB_THREADS)");
}

void apply_threads(int k) {
    if (k <= 0) {
        if (const char* env = std::getenv("CASCADE_LAB_THREADS")) {
            try {
                k = std::stoi(env);
            } catch (const std::exception&) {
                throw Error("CASCADE_LAB_THREADS must be a positive integer");
            }
            if (k <= 0) throw Error("CASCADE_LAB_THREADS must be a positive integer");
        }
    }
    if (k > 0) omp_set_num_threads(k);
}

RunConfig load_config(const Common& c) { return parse_config(read_file(c.config), c.overrides); }

fs::path run_dir(const Common& c, const RunConfig& cfg, const std::string& command) {
    const fs::path root = c.out.empty() ? fs::path(cfg.output_dir) : fs::path(c.out);
    return root / ("run-" + fnv1a_hex(command + "\n" + emit_config(cfg)));
}

std::string member_name(std::uint64_t id) {
    std::ostringstream os;
    os << "member_" << std::setw(4) << std::setfill('0') << id << ".csv";
    return os.str();
}

fs::path nu_dir(const fs::path& dir, std::size_t k) { return dir / ("nu_" + std::to_string(k)); }

void write_streams(const fs::path& dir, const std::vector<DiagnosticsStream>& streams) {
    for (const auto& s : streams) atomic_write(dir / member_name(s.stream_id), stream_csv(s));
}

void write_manifest(const fs::path& dir, const std::string& command, const RunConfig& cfg) {
    const std::string text = emit_config(cfg);
    Json ids = Json::array();
    for (std::size_t i = 0; i < cfg.members; ++i) ids.push_back(i);
    Json m;
    m["schema_version"] = kSchemaVersion;
    m["code_version"] = kCodeVersion;
    m["command"] = command;
    m["config_hash"] = fnv1a_hex(text);
    m["base_seed"] = cfg.base_seed;
    m["nu_grid"] = cfg.nu_grid;
    m["stream_ids"] = ids;
    m["layout"] = "nu_<k>/member_<id>.csv, k indexes nu_grid";
    m["config"] = text;
    atomic_write(dir / "config.ini", text);
    atomic_write(dir / "schema.json", schema_json().dump(2) + "\n");
    atomic_write(dir / "manifest.json", m.dump(2) + "\n");
}

RunConfig config_from_run(const fs::path& dir) {
    const Json m = Json::parse(read_file(dir / "manifest.json"));
    if (m.value("schema_version", 0) != kSchemaVersion) throw Error("run directory has an unsupported schema version");
    return parse_config(m.at("config").get<std::string>());
}

std::vector<DiagnosticsStream> read_run_streams(const fs::path& dir, const RunConfig& cfg, std::size_t k) {
    const int cm = recorder_for(cfg.parsed_observables()).cm_order;
    std::vector<DiagnosticsStream> out;
    for (std::size_t i = 0; i < cfg.members; ++i) {
        const fs::path p = nu_dir(dir, k) / member_name(i);
        if (!fs::exists(p)) continue;  // aborted members leave no file
        std::istringstream is(read_file(p));
        DiagnosticsStream s = read_stream_csv(is, i);
        s.cm_order = s.cm_order >= 0 ? cm : -1;
        out.push_back(std::move(s));
    }
    if (out.empty()) throw Error("no member streams under " + nu_dir(dir, k).string());
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

double pooled_median(const std::vector<DiagnosticsStream>& streams, double m, double tau0, double tau1) {
    std::vector<double> xs;
    for (const auto& s : streams) {
        const std::size_t col = s.norm_column(m);
        for (const auto& r : s.records)
            if (r.tau >= tau0 - 1e-12 && r.tau <= tau1 + 1e-12) xs.push_back(r.norms[col]);
    }
    if (xs.empty()) throw Error("no samples in the occupation window");
    return quantile(std::move(xs), 0.5);
}

int cmd_simulate(const Common& c, std::ostream& out) {
    const RunConfig cfg = load_config(c);
    if (cfg.nu_grid.size() != 1) throw Error("simulate runs a single nu; use sim.nu (sweep takes sim.nu_grid)");
    const double nu = cfg.nu();
    const fs::path dir = run_dir(c, cfg, "simulate");
    write_manifest(dir, "simulate", cfg);
    const auto obs = cfg.parsed_observables();
    const ObservationWindow w{cfg.window_start / nu, (cfg.window_start + cfg.window_length) / nu};
    const EnsembleResult res = ensemble_run(cfg.ensemble_task(nu), obs, w);
    write_streams(nu_dir(dir, 0), res.run.streams);
    const NoiseSpec spec = cfg.noise();
    const BalanceReport bal = balance_check(res.run.streams, cfg.burn_in, spec.bk_sum(0.0), cfg.min_post_burn_in);
    std::string report = json_line("ensemble_summary", to_json(res.summary));
    report += json_line("balance", to_json(bal));
    atomic_write(dir / "report.jsonl", report);

    out << "run directory: " << dir.string() << "\n";
    out << "nu = " << fmt(nu) << "  members = " << res.summary.members << "  aborted = " << res.summary.aborted << "\n";
    for (const auto& s : res.summary.observables)
        out << "  " << s.name << ": mean = " << fmt(s.mean) << "  se = " << fmt(s.se) << "  median = " << fmt(s.median())
            << "\n";
    out << "  <||u||_1^2> = " << fmt(bal.avg_h1_sq) << "  B_0 = " << fmt(bal.b0) << "\n";
    return kExitOk;
}

int cmd_sweep(const Common& c, std::ostream& out) {
    const RunConfig cfg = load_config(c);
    const fs::path dir = run_dir(c, cfg, "sweep");
    write_manifest(dir, "sweep", cfg);
    const SweepReport rep = nu_sweep(cfg.sweep_plan(), Execution::parallel,
                                     [&](std::size_t k, const EnsembleResult& r) {
                                         write_streams(nu_dir(dir, k), r.run.streams);
                                     });
    std::string report;
    for (const auto& e : rep.entries) report += json_line("ensemble_summary", to_json(e));
    bool ok = true;
    for (const auto& v : rep.verdicts) {
        Json j = to_json(v);
        const bool pass = verdict_passed(v);
        j["pass"] = pass;
        ok = ok && pass;
        report += json_line("verdict", j);
    }
    atomic_write(dir / "report.jsonl", report);

    out << "run directory: " << dir.string() << "\n";
    if (rep.fit_refused) out << "fewer than 3 nu values: exponent fit skipped\n";
    for (const auto& v : rep.verdicts) {
        out << v.observable.name() << "\n";
        for (std::size_t k = 0; k < rep.entries.size(); ++k)
            out << "  nu = " << fmt(rep.entries[k].nu) << "  mean = " << fmt(v.means[k]) << "  median = " << fmt(v.medians[k])
                << "\n";
        if (v.fit) out << "  alpha = " << fmt(v.fit->alpha) << "  r2 = " << fmt(v.fit->r2) << "\n";
        out << "  " << (verdict_passed(v) ? "PASS" : "FAIL") << "\n";
    }
    return ok ? kExitOk : kExitVerdict;
}

int cmd_stationary(const Common& c, std::ostream& out) {
    const RunConfig cfg = load_config(c);
    const fs::path dir = run_dir(c, cfg, "stationary");
    write_manifest(dir, "stationary", cfg);
    const StationaryPlan plan = cfg.stationary_plan();
    const StationarySweepReport rep =
        stationary_sweep(plan, Execution::parallel,
                         [&](std::size_t k, const EnsembleRun& r) { write_streams(nu_dir(dir, k), r.streams); });
    std::string report;
    bool ok = true;
    for (const auto& e : rep.entries) {
        Json j = to_json(e, plan.moment_orders);
        const bool pass = e.balance.degenerate || std::abs(e.balance.relative_residual) <= cfg.balance_tolerance;
        j["balance_pass"] = pass;
        ok = ok && pass;
        report += json_line("stationary_entry", j);
    }
    for (const auto& b : rep.brackets) report += json_line("moment_bracket", to_json(b));
    atomic_write(dir / "report.jsonl", report);

    out << "run directory: " << dir.string() << "\n";
    for (const auto& e : rep.entries)
        out << "nu = " << fmt(e.nu) << "  <||u||_1^2> = " << fmt(e.balance.avg_h1_sq) << " +- " << fmt(e.balance.se)
            << "  B_0 = " << fmt(e.balance.b0) << "  residual = " << fmt(e.balance.relative_residual) << "\n";
    for (const auto& b : rep.brackets)
        if (b.fit)
            out << "m = " << fmt(b.m) << "  alpha = " << fmt(b.fit->alpha) << "  window [" << fmt(b.lower_exponent) << ", "
                << fmt(b.upper_exponent) << "]\n";
    out << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? kExitOk : kExitVerdict;
}

int cmd_occupation(const std::string& run, std::size_t nu_index, std::ostream& out) {
    const fs::path dir(run);
    const RunConfig cfg = config_from_run(dir);
    if (nu_index >= cfg.nu_grid.size()) throw Error("--nu-index is outside the run's nu grid");
    const auto streams = read_run_streams(dir, cfg, nu_index);
    const double b0 = cfg.noise().bk_sum(0.0);
    const double tau0 = cfg.occupation_tau0, tau1 = cfg.occupation_tau;
    const double med0 = pooled_median(streams, 0.0, tau0, tau1);
    const double gamma = cfg.gamma_factor * pooled_median(streams, 2.0, tau0, tau1);
    std::string report;
    bool ok = true;
    out << "Gamma = " << fmt(gamma) << "  B_0 = " << fmt(b0) << "\n";
    for (double f : cfg.chi_factors) {
        const OccupationReport r = occupation_check(streams, f * med0, gamma, tau0, tau1, b0);
        ok = ok && r.pass;
        report += json_line("occupation", to_json(r));
        report += json_line("stationary_probability",
                            to_json(stationary_check(streams, f * med0, gamma, b0, cfg.burn_in)));
        out << "chi = " << fmt(r.chi) << "  lhs = " << fmt(r.lhs_estimate) << " +- " << fmt(r.lhs_se)
            << "  rhs = " << fmt(r.rhs_bound) << "  " << (r.pass ? "PASS" : "FAIL") << "\n";
    }
    atomic_write(dir / ("occupation_nu_" + std::to_string(nu_index) + ".jsonl"), report);
    return ok ? kExitOk : kExitVerdict;
}

int cmd_spectrum(const Common& c, const std::string& run, std::ostream& out) {
    fs::path dir;
    RunConfig cfg;
    std::vector<DiagnosticsStream> streams;
    if (!run.empty()) {
        dir = run;
        cfg = config_from_run(dir);
        streams = read_run_streams(dir, cfg, 0);
    } else {
        if (c.config.empty()) throw Error("spectrum needs --config or a run directory");
        cfg = load_config(c);
        cfg.shells = true;
        dir = run_dir(c, cfg, "spectrum");
        write_manifest(dir, "spectrum", cfg);
        streams = run_ensemble(cfg.ensemble_task(cfg.nu())).streams;
        write_streams(nu_dir(dir, 0), streams);
    }
    if (!streams.front().has_shells) throw Error("run was recorded without shells; set experiment.shells = true");
    const std::size_t K = streams.front().records.front().shells.size();
    std::vector<std::vector<double>> per_member(K);
    for (const auto& s : streams) {
        const auto first = static_cast<std::size_t>(std::floor(cfg.burn_in * static_cast<double>(s.records.size())));
        std::vector<double> acc(K, 0.0);
        for (std::size_t i = first; i < s.records.size(); ++i)
            for (std::size_t k = 0; k < K; ++k) acc[k] += s.records[i].shells[k];
        for (std::size_t k = 0; k < K; ++k) per_member[k].push_back(acc[k] / static_cast<double>(s.records.size() - first));
    }
    std::string report;
    out << "k  energy  se\n";
    for (std::size_t k = 0; k < K; ++k) {
        const ObservableSummary sm = summarize("shell", per_member[k]);
        Json j;
        j["k"] = k + 1;
        j["energy"] = sm.mean;
        j["se"] = sm.se;
        report += json_line("spectrum", j);
        out << k + 1 << "  " << fmt(sm.mean) << "  " << fmt(sm.se) << "\n";
    }
    atomic_write(dir / "spectrum.jsonl", report);
    return kExitOk;
}

int cmd_fit(const std::string& csv, std::ostream& out) {
    std::istringstream is(read_file(csv));
    const auto pts = read_scaling_csv(is);
    const ScalingFit f = fit_exponent(pts);
    out << "alpha = " << fmt(f.alpha) << "\n";
    out << "intercept = " << fmt(f.intercept) << "\n";
    out << "r2 = " << fmt(f.r2) << "\n";
    return kExitOk;
}

int cmd_selftest(std::ostream& out) {
    bool ok = true;
    for (const auto& r : run_selftest()) {
        out << (r.pass ? "PASS " : "FAIL ") << r.name;
        if (!r.detail.empty()) out << "  (" << r.detail << ")";
        out << "\n";
        ok = ok && r.pass;
    }
    return ok ? kExitOk : kExitVerdict;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectral Monte Carlo lab for the damped-driven stochastic cubic Schrodinger equation", "cascade_lab"};
    app.require_subcommand(1);

    Common common;
    std::string positional;
    std::size_t nu_index = 0;

    auto* simulate = app.add_subcommand("simulate", "Run one ensemble at sim.nu");
    add_common(simulate, common, true);
    auto* sweep = app.add_subcommand("sweep", "Run ensembles across sim.nu_grid and fit exponents");
    add_common(sweep, common, true);
    auto* stationary = app.add_subcommand("stationary", "Long-time averages, balance relation and moment brackets");
    add_common(stationary, common, true);
    auto* occupation = app.add_subcommand("occupation", "Occupation-time check over an existing run directory");
    occupation->add_option("run", positional, "Run directory")->required();
    occupation->add_option("--nu-index", nu_index, "Which nu of the run to use");
    occupation->add_option("--threads", common.threads, "OpenMP threads");
    auto* spectrum = app.add_subcommand("spectrum", "Time-averaged shell energies");
    spectrum->add_option("run", positional, "Existing run directory recorded with shells");
    add_common(spectrum, common, false);
    auto* fit = app.add_subcommand("fit", "Fit q ~ nu^{-alpha} to a CSV of (nu, q)");
    fit->add_option("csv", positional, "CSV file")->required();
    auto* selftest = app.add_subcommand("selftest", "Built-in invariant checks");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kExitUsage;
    }

    try {
        apply_threads(common.threads);
        if (simulate->parsed()) return cmd_simulate(common, out);
        if (sweep->parsed()) return cmd_sweep(common, out);
        if (stationary->parsed()) return cmd_stationary(common, out);
        if (occupation->parsed()) return cmd_occupation(positional, nu_index, out);
        if (spectrum->parsed()) return cmd_spectrum(common, positional, out);
        if (fit->parsed()) return cmd_fit(positional, out);
        if (selftest->parsed()) return cmd_selftest(out);
    } catch (const ConfigError& e) {
        err << "configuration error:\n";
        for (const auto& v : e.violations()) err << "  " << v << "\n";
        return kExitUsage;
    } catch (const AbortFractionExceeded& e) {
        err << "run failed: " << e.what() << "\n";
        return kExitVerdict;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    err << app.help();
    return kExitUsage;
}

}  // namespace cascade
