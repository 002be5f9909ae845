#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cascade/ensemble.hpp"

namespace cascade {

struct ScalingPoint {
    double nu = 0.0;
    double q = 0.0;
    double se = 0.0;
};

/// Least-squares fit log q = intercept + alpha log(1/nu).
struct ScalingFit {
    std::vector<ScalingPoint> points;
    double alpha = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;
};

/// Needs >= 3 points with nu > 0 and q > 0, and at least two distinct nu.
ScalingFit fit_exponent(std::span<const ScalingPoint> points);

struct SweepPlan {
    GridSpec grid{1, 64, 32};
    NoiseProfile noise;
    std::vector<double> nu_grid{0.4, 0.2, 0.1, 0.05, 0.025};
    SimParams sim;  // nu, T, stream_id set per entry; dt <= 0 picks the scheme default
    std::size_t members = 64;
    std::vector<Observable> observables;
    InitialConstraint initial;
    double window_start = 1.0;   // slow time at which the observation window opens
    double window_length = 1.0;  // slow-time length of the window
    double slack = 0.5;          // allowed excess of alpha over m on the upper side
    /// Every nu steps with the slow-time step of the smallest nu, so member i
    /// sees the same slow-time Brownian path at every nu.
    bool shared_slow_path = true;

    void validate() const;
    double horizon_slow() const { return window_start + window_length; }
};

struct ObservableVerdict {
    Observable observable;
    std::vector<double> means;
    std::vector<double> ses;
    std::vector<double> medians;
    std::optional<ScalingFit> fit;          // absent for single-nu plans
    std::optional<bool> upper_ok;           // alpha <= m + slack (Sobolev observables)
    std::optional<bool> positive_ok;        // alpha > 0
    bool monotone_means = false;            // strictly increasing as nu decreases
    bool monotone_medians = false;
    double median_spread = 1.0;             // max / min of the medians
    std::vector<ExpMoment> exp_moments;     // sup_inf_norm only, c = exp_moment_c
};

inline constexpr double kExpMomentC = 0.1;

/// Sobolev: monotone means, 0 < alpha <= m + slack. C^m: monotone medians.
/// Sup norm: median spread below kSupSpreadLimit. Without a fit only trends count.
bool verdict_passed(const ObservableVerdict& v);
inline constexpr double kSupSpreadLimit = 3.0;

struct SweepReport {
    SweepPlan plan;
    std::vector<EnsembleSummary> entries;  // nu_grid order
    std::vector<ObservableVerdict> verdicts;
    bool fit_refused = false;
};

using SweepCallback = std::function<void(std::size_t nu_index, const EnsembleResult&)>;

/// Fast-time step at `nu`. With `shared` every nu uses the slow-time step
/// of the smallest nu in the grid; sim.dt <= 0 means the scheme default.
double shared_dt(const SimParams& sim, const GridSpec& grid, const std::vector<double>& nu_grid, double nu,
                 bool shared);

/// Builds the ensemble task for one nu of a sweep (policy initial data, T = horizon / nu).
EnsembleTask sweep_task(const SweepPlan& plan, double nu);

SweepReport nu_sweep(const SweepPlan& plan, Execution exec = Execution::parallel,
                     const SweepCallback& on_entry = {});

struct StationaryPlan {
    GridSpec grid{1, 64, 32};
    NoiseProfile noise;
    std::vector<double> nu_grid{0.4, 0.2, 0.1, 0.05};
    SimParams sim;
    std::size_t members = 16;
    std::vector<double> moment_orders{0.0, 1.0, 2.0};
    double horizon_slow = 12.5;
    double burn_in = 0.2;
    double min_post_burn_in = 10.0;
    InitialConstraint initial;
    bool shared_slow_path = true;

    void validate() const;
};

struct StationaryEntry {
    double nu = 0.0;
    BalanceReport balance;
    std::vector<MomentEstimate> moments;  // aligned with moment_orders
    std::size_t aborted = 0;
};

/// Exponent window 2 m kappa - 1 <= alpha <= m for E||u||_m^2 across nu.
struct MomentBracket {
    double m = 0.0;
    std::optional<ScalingFit> fit;
    double lower_exponent = 0.0;
    double upper_exponent = 0.0;
    double c_upper = 0.0;  // max_nu E / nu^{-m}
    double c_lower = 0.0;  // max_nu nu^{1 - 2 m kappa} / E
    bool consistent = false;
};

struct StationarySweepReport {
    StationaryPlan plan;
    std::vector<StationaryEntry> entries;
    std::vector<MomentBracket> brackets;
    bool degenerate = false;
};

using StationaryCallback = std::function<void(std::size_t nu_index, const EnsembleRun&)>;

EnsembleTask stationary_task(const StationaryPlan& plan, double nu);

StationarySweepReport stationary_sweep(const StationaryPlan& plan, Execution exec = Execution::parallel,
                                       const StationaryCallback& on_entry = {});

/// Linear-only stationary E||u||_m^2 = B_{m-1}.
double linear_stationary_moment(const NoiseSpec& spec, double m);

}  // namespace cascade
