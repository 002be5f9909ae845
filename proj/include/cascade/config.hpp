#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cascade/experiments.hpp"

namespace cascade {

/// Every violation found while parsing, not just the first.
class ConfigError : public Error {
  public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

  private:
    std::vector<std::string> violations_;
};

/**
 * Run configuration. Text form is INI-like:
 *
 *   # comment
 *   [grid]
 *   n = 1
 *   N = 64
 *   D = 32
 *   [noise]
 *   profile = band:1,1,1
 *   [sim]
 *   nu = 0.1              (or nu_grid = 0.4,0.2,0.1)
 *   ...
 *
 * Required keys: grid.n, grid.N, grid.D, noise.profile, sim.nu or
 * sim.nu_grid, ensemble.base_seed. Everything else has a default; see
 * README for the full key table. Unknown keys are errors.
 */
struct RunConfig {
    int n = 1;
    int N = 64;
    int D = 32;

    std::string noise_profile = "band:1,1,1";

    std::vector<double> nu_grid{0.1};
    std::optional<double> dt;  // scheme default when absent
    double T_slow = 2.0;
    int record_every = 10;
    Scheme scheme = Scheme::strang;
    bool nonlinear = true;

    std::size_t members = 64;
    std::uint64_t base_seed = 0;

    std::vector<std::string> observables{"time_avg_sobolev(2)", "sup_cm(2)", "sup_inf_norm"};
    double window_start = 1.0;
    double window_length = 1.0;
    double burn_in = 0.2;
    double min_post_burn_in = 10.0;
    double balance_tolerance = 0.1;
    double slack = 0.5;
    double kappa = 0.02;
    double sup_bound = 1.0;
    double initial_m = 2.0;
    std::string initial = "policy";  // policy | zero | random:q=<decay>
    bool shells = false;
    bool shared_slow_path = true;  // sweep: one slow-time step for every nu

    std::vector<double> chi_factors{0.05, 0.1, 0.2};
    double gamma_factor = 2.0;
    double occupation_tau0 = 0.0;
    double occupation_tau = 1.0;

    std::string output_dir = "runs";

    friend bool operator==(const RunConfig&, const RunConfig&) = default;

    GridSpec grid() const { return GridSpec(n, N, D); }
    NoiseSpec noise() const { return NoiseSpec::parse(grid(), noise_profile); }
    double nu() const { return nu_grid.front(); }
    double step(double nu) const { return dt.value_or(default_dt(scheme, nu, grid())); }
    SimParams sim(double nu) const;
    SpectralField initial_field(double nu) const;
    std::vector<Observable> parsed_observables() const;
    SweepPlan sweep_plan() const;
    StationaryPlan stationary_plan() const;
    EnsembleTask ensemble_task(double nu) const;
};

/// Applies `overrides` ("section.key=value") on top of the text, then validates.
RunConfig parse_config(const std::string& text,
                       const std::vector<std::string>& overrides = {});
/// Canonical text; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& c);

}  // namespace cascade
