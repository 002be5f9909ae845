#include "cascade/config.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "cascade/io.hpp"

namespace cascade {

namespace {

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "grid.n", "grid.N", "grid.D",
        "noise.profile",
        "sim.nu", "sim.nu_grid", "sim.dt", "sim.T_slow", "sim.record_every", "sim.scheme", "sim.nonlinear",
        "ensemble.M", "ensemble.base_seed",
        "experiment.observables", "experiment.window_start", "experiment.window_length",
        "experiment.burn_in", "experiment.min_post_burn_in", "experiment.balance_tolerance",
        "experiment.slack", "experiment.kappa", "experiment.sup_bound", "experiment.initial_m",
        "experiment.initial", "experiment.shells", "experiment.shared_slow_path",
        "occupation.chi_factors", "occupation.gamma_factor", "occupation.tau0", "occupation.tau",
        "output.dir",
    };
    return keys;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, ',')) out.push_back(trim(cur));
    return out;
}

class Fields {
  public:
    std::map<std::string, std::string> values;
    std::vector<std::string> violations;

    bool has(const std::string& k) const { return values.count(k) > 0; }

    template <typename T>
    void number(const std::string& key, T& target) {
        auto it = values.find(key);
        if (it == values.end()) return;
        const std::string& s = it->second;
        T v{};
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            violations.push_back(key + ": cannot parse '" + s + "' as a number");
            return;
        }
        target = v;
    }

    void number_list(const std::string& key, std::vector<double>& target) {
        auto it = values.find(key);
        if (it == values.end()) return;
        std::vector<double> out;
        for (const std::string& tok : split_list(it->second)) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
                violations.push_back(key + ": cannot parse list entry '" + tok + "'");
                return;
            }
            out.push_back(v);
        }
        target = out;
    }

    void text(const std::string& key, std::string& target) {
        auto it = values.find(key);
        if (it != values.end()) target = it->second;
    }

    void boolean(const std::string& key, bool& target) {
        auto it = values.find(key);
        if (it == values.end()) return;
        if (it->second == "true") target = true;
        else if (it->second == "false") target = false;
        else violations.push_back(key + ": expected true or false, got '" + it->second + "'");
    }

    void require(const std::string& key) {
        if (!has(key)) violations.push_back(key + ": required key is missing");
    }

    void check(bool ok, const std::string& msg) {
        if (!ok) violations.push_back(msg);
    }
};

std::string join_numbers(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
    return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error([&] {
          std::string msg = "invalid configuration:";
          for (const auto& v : violations) msg += "\n  - " + v;
          return msg;
      }()),
      violations_(std::move(violations)) {}

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
    Fields f;
    const std::set<std::string> known(known_keys().begin(), known_keys().end());
    std::string section;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    auto put = [&](const std::string& key, const std::string& value, const std::string& where) {
        if (!known.count(key)) {
            f.violations.push_back(where + "unknown key '" + key + "'");
            return;
        }
        f.values[key] = value;
    };
    std::set<std::string> seen;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string where = "line " + std::to_string(lineno) + ": ";
        const std::string t = trim(line.substr(0, line.find('#')));
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                f.violations.push_back(where + "malformed section header");
                continue;
            }
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            f.violations.push_back(where + "expected 'key = value'");
            continue;
        }
        const std::string key = (section.empty() ? "" : section + ".") + trim(t.substr(0, eq));
        if (!seen.insert(key).second) f.violations.push_back(where + "duplicate key '" + key + "'");
        put(key, trim(t.substr(eq + 1)), where);
    }
    for (const std::string& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) {
            f.violations.push_back("override '" + o + "': expected key=value");
            continue;
        }
        const std::string key = trim(o.substr(0, eq));
        put(key, trim(o.substr(eq + 1)), "override: ");
        if (key == "sim.nu") f.values.erase("sim.nu_grid");
        if (key == "sim.nu_grid") f.values.erase("sim.nu");
    }

    RunConfig c;
    for (const char* k : {"grid.n", "grid.N", "grid.D", "noise.profile", "ensemble.base_seed"}) f.require(k);
    if (!f.has("sim.nu") && !f.has("sim.nu_grid")) f.violations.push_back("sim.nu: required key is missing (or give sim.nu_grid)");
    if (f.has("sim.nu") && f.has("sim.nu_grid")) f.violations.push_back("sim: give either nu or nu_grid, not both");

    f.number("grid.n", c.n);
    f.number("grid.N", c.N);
    f.number("grid.D", c.D);
    f.text("noise.profile", c.noise_profile);
    if (f.has("sim.nu")) {
        double nu = 0.0;
        f.number("sim.nu", nu);
        c.nu_grid = {nu};
    }
    f.number_list("sim.nu_grid", c.nu_grid);
    if (f.has("sim.dt")) {
        double dt = 0.0;
        f.number("sim.dt", dt);
        c.dt = dt;
    }
    f.number("sim.T_slow", c.T_slow);
    f.number("sim.record_every", c.record_every);
    if (f.has("sim.scheme")) {
        try {
            c.scheme = parse_scheme(f.values["sim.scheme"]);
        } catch (const Error& e) {
            f.violations.push_back(std::string("sim.scheme: ") + e.what());
        }
    }
    f.boolean("sim.nonlinear", c.nonlinear);
    f.number("ensemble.M", c.members);
    f.number("ensemble.base_seed", c.base_seed);
    if (f.has("experiment.observables")) c.observables = split_list(f.values["experiment.observables"]);
    f.number("experiment.window_start", c.window_start);
    f.number("experiment.window_length", c.window_length);
    f.number("experiment.burn_in", c.burn_in);
    f.number("experiment.min_post_burn_in", c.min_post_burn_in);
    f.number("experiment.balance_tolerance", c.balance_tolerance);
    f.number("experiment.slack", c.slack);
    f.number("experiment.kappa", c.kappa);
    f.number("experiment.sup_bound", c.sup_bound);
    f.number("experiment.initial_m", c.initial_m);
    f.text("experiment.initial", c.initial);
    f.boolean("experiment.shells", c.shells);
    f.boolean("experiment.shared_slow_path", c.shared_slow_path);
    f.number_list("occupation.chi_factors", c.chi_factors);
    f.number("occupation.gamma_factor", c.gamma_factor);
    f.number("occupation.tau0", c.occupation_tau0);
    f.number("occupation.tau", c.occupation_tau);
    f.text("output.dir", c.output_dir);

    // Range checks.
    f.check(c.n >= 1, "grid.n must be >= 1");
    f.check(c.N >= 4, "grid.N must be >= 4");
    f.check(c.D >= 1, "grid.D must be >= 1");
    f.check(c.D <= c.N, "grid.D must be <= grid.N (spectral truncation cannot exceed the lattice)");
    if (c.n >= 1 && c.N >= 4 && c.D >= 1 && c.D <= c.N) {
        try {
            NoiseSpec::parse(GridSpec(c.n, c.N, c.D), c.noise_profile);
        } catch (const Error& e) {
            f.violations.push_back(std::string("noise.profile: ") + e.what());
        }
    }
    f.check(!c.nu_grid.empty(), "sim.nu_grid must not be empty");
    for (std::size_t i = 0; i < c.nu_grid.size(); ++i) {
        f.check(c.nu_grid[i] > 0.0 && c.nu_grid[i] <= 1.0, "sim.nu values must lie in (0, 1]");
        if (i > 0) f.check(c.nu_grid[i] < c.nu_grid[i - 1], "sim.nu_grid must be strictly decreasing");
    }
    if (c.dt) f.check(*c.dt > 0.0, "sim.dt must be > 0");
    f.check(c.T_slow > 0.0, "sim.T_slow must be > 0");
    f.check(c.record_every >= 1, "sim.record_every must be >= 1");
    f.check(c.members >= 1, "ensemble.M must be >= 1");
    for (const auto& o : c.observables) {
        try {
            Observable::parse(o);
        } catch (const Error& e) {
            f.violations.push_back(std::string("experiment.observables: ") + e.what());
        }
    }
    f.check(c.window_start >= 0.0 && c.window_length > 0.0, "experiment window must have start >= 0 and length > 0");
    f.check(c.burn_in >= 0.0 && c.burn_in < 1.0, "experiment.burn_in must be in [0, 1)");
    f.check(c.balance_tolerance > 0.0, "experiment.balance_tolerance must be > 0");
    f.check(c.kappa >= 0.0, "experiment.kappa must be >= 0");
    f.check(c.sup_bound > 0.0, "experiment.sup_bound must be > 0");
    f.check(c.initial_m >= 0.0, "experiment.initial_m must be >= 0");
    f.check(c.initial == "policy" || c.initial == "zero" || c.initial.rfind("random:q=", 0) == 0,
            "experiment.initial must be policy, zero or random:q=<decay>");
    for (double x : c.chi_factors) f.check(x > 0.0, "occupation.chi_factors must be > 0");
    f.check(c.gamma_factor > 0.0, "occupation.gamma_factor must be > 0");
    f.check(c.occupation_tau > c.occupation_tau0 && c.occupation_tau0 >= 0.0,
            "occupation window must satisfy 0 <= tau0 < tau");

    if (!f.violations.empty()) throw ConfigError(f.violations);
    return c;
}

std::string emit_config(const RunConfig& c) {
    std::ostringstream os;
    auto list = [](const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
        return s;
    };
    os << "[grid]\nn = " << c.n << "\nN = " << c.N << "\nD = " << c.D << "\n\n";
    os << "[noise]\nprofile = " << c.noise_profile << "\n\n";
    os << "[sim]\n";
    if (c.nu_grid.size() == 1)
        os << "nu = " << format_double(c.nu_grid.front()) << "\n";
    else
        os << "nu_grid = " << join_numbers(c.nu_grid) << "\n";
    if (c.dt) os << "dt = " << format_double(*c.dt) << "\n";
    os << "T_slow = " << format_double(c.T_slow) << "\n";
    os << "record_every = " << c.record_every << "\n";
    os << "scheme = " << to_string(c.scheme) << "\n";
    os << "nonlinear = " << (c.nonlinear ? "true" : "false") << "\n\n";
    os << "[ensemble]\nM = " << c.members << "\nbase_seed = " << c.base_seed << "\n\n";
    os << "[experiment]\n";
    os << "observables = " << list(c.observables) << "\n";
    os << "window_start = " << format_double(c.window_start) << "\n";
    os << "window_length = " << format_double(c.window_length) << "\n";
    os << "burn_in = " << format_double(c.burn_in) << "\n";
    os << "min_post_burn_in = " << format_double(c.min_post_burn_in) << "\n";
    os << "balance_tolerance = " << format_double(c.balance_tolerance) << "\n";
    os << "slack = " << format_double(c.slack) << "\n";
    os << "kappa = " << format_double(c.kappa) << "\n";
    os << "sup_bound = " << format_double(c.sup_bound) << "\n";
    os << "initial_m = " << format_double(c.initial_m) << "\n";
    os << "initial = " << c.initial << "\n";
    os << "shells = " << (c.shells ? "true" : "false") << "\n";
    os << "shared_slow_path = " << (c.shared_slow_path ? "true" : "false") << "\n\n";
    os << "[occupation]\n";
    os << "chi_factors = " << join_numbers(c.chi_factors) << "\n";
    os << "gamma_factor = " << format_double(c.gamma_factor) << "\n";
    os << "tau0 = " << format_double(c.occupation_tau0) << "\n";
    os << "tau = " << format_double(c.occupation_tau) << "\n\n";
    os << "[output]\ndir = " << c.output_dir << "\n";
    return os.str();
}

SimParams RunConfig::sim(double nu) const {
    SimParams p;
    p.nu = nu;
    p.dt = step(nu);
    p.T = T_slow / nu;
    p.scheme = scheme;
    p.record_every = record_every;
    p.seed = base_seed;
    p.nonlinear = nonlinear;
    return p;
}

SpectralField RunConfig::initial_field(double nu) const {
    const GridSpec g = grid();
    if (initial == "zero") return zero_field(g);
    if (initial.rfind("random:q=", 0) == 0) {
        const double q = std::stod(initial.substr(9));
        return smooth_random_field(g, q, RngStream(base_seed, 0));
    }
    return policy_initial(g, nu, InitialConstraint{sup_bound, kappa, initial_m});
}

std::vector<Observable> RunConfig::parsed_observables() const {
    std::vector<Observable> out;
    for (const auto& o : observables) out.push_back(Observable::parse(o));
    return out;
}

EnsembleTask RunConfig::ensemble_task(double nu) const {
    EnsembleTask t;
    t.spec = noise();
    t.params = sim(nu);
    t.members = members;
    t.recorder = recorder_for(parsed_observables());
    t.recorder.shells = shells;
    if (initial.rfind("random:q=", 0) == 0)
        t.random_initial_decay = std::stod(initial.substr(9));
    else
        t.u0 = initial_field(nu);
    return t;
}

SweepPlan RunConfig::sweep_plan() const {
    SweepPlan p;
    p.grid = grid();
    p.noise = NoiseProfile::parse(noise_profile);
    p.nu_grid = nu_grid;
    p.sim = sim(nu_grid.front());
    p.sim.dt = dt.value_or(0.0);
    p.members = members;
    p.observables = parsed_observables();
    p.initial = InitialConstraint{sup_bound, kappa, initial_m};
    p.window_start = window_start;
    p.window_length = window_length;
    p.slack = slack;
    p.shared_slow_path = shared_slow_path;
    return p;
}

StationaryPlan RunConfig::stationary_plan() const {
    StationaryPlan p;
    p.grid = grid();
    p.noise = NoiseProfile::parse(noise_profile);
    p.nu_grid = nu_grid;
    p.sim = sim(nu_grid.front());
    p.sim.dt = dt.value_or(0.0);
    p.members = members;
    p.horizon_slow = T_slow;
    p.burn_in = burn_in;
    p.min_post_burn_in = min_post_burn_in;
    p.shared_slow_path = shared_slow_path;
    p.initial = InitialConstraint{sup_bound, kappa, initial_m};
    return p;
}

}  // namespace cascade
