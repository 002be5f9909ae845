#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cascade/integrators.hpp"
#include "cascade/transform.hpp"

namespace cascade {

struct RecorderConfig {
    std::vector<double> norm_orders{0.0, 1.0, 2.0};
    int cm_order = -1;  // < 0 disables the C^m column
    bool shells = false;
};

struct DiagnosticsRecord {
    double t = 0.0;
    double tau = 0.0;
    std::vector<double> norms;  // aligned with DiagnosticsStream::norm_orders
    double sup = 0.0;
    std::optional<double> cm;
    std::vector<double> shells;
};

/// One trajectory's measurement stream at a fixed fast-time cadence.
struct DiagnosticsStream {
    std::uint64_t stream_id = 0;
    double nu = 1.0;
    double sample_dt = 0.0;  // fast time between records
    std::vector<double> norm_orders;
    int cm_order = -1;
    bool has_shells = false;
    bool aborted = false;
    double abort_time = 0.0;
    std::vector<DiagnosticsRecord> records;

    double sample_dtau() const { return nu * sample_dt; }
    /// Column of norm_orders equal to m; throws if not recorded.
    std::size_t norm_column(double m) const;
};

/// Trajectory sink that turns states into DiagnosticsRecords.
class Recorder {
  public:
    Recorder(const GridSpec& grid, RecorderConfig cfg, const SimParams& params);

    void operator()(const TrajectoryState& st);
    TrajectorySink sink() {
        return [this](const TrajectoryState& st) { (*this)(st); };
    }

    DiagnosticsStream& stream() { return stream_; }
    DiagnosticsStream take() { return std::move(stream_); }

  private:
    RecorderConfig cfg_;
    SineTransform tr_;
    DiagnosticsStream stream_;
};

struct OccupationReport {
    double chi = 0.0;
    double gamma = 0.0;
    double tau0 = 0.0;
    double tau = 0.0;
    double b0 = 0.0;
    double lhs_estimate = 0.0;
    double lhs_se = 0.0;
    double rhs_bound = 0.0;
    std::size_t trajectories = 0;
    std::size_t capped = 0;  // trajectories whose stopping time fell inside the window
    bool pass = false;       // lhs <= rhs + 2 se
};

/**
 * Occupation time E int_{tau0}^{tau ^ tau_Gamma} 1{||u||_0 <= chi} ds against
 * 2 (1 + tau) chi Gamma / B_0, in slow time. tau_Gamma is the first sample at
 * or after tau0 with ||u||_2 >= Gamma; integrals use the left-rectangle rule.
 * Aborted streams are skipped.
 */
OccupationReport occupation_check(std::span<const DiagnosticsStream> streams, double chi,
                                  double gamma, double tau0, double tau, double b0);

struct StationaryReport {
    double chi = 0.0;
    double gamma = 0.0;  // Gamma used for the bound
    double frequency = 0.0;
    double wilson_lo = 0.0;
    double wilson_hi = 0.0;
    double bound = 0.0;  // 2 chi Gamma / B_0
    std::size_t samples = 0;
    bool applicable = false;  // bound < 1
    bool pass = false;
};

/**
 * Empirical P(||u||_0 <= chi) over post-burn-in samples with a 95% Wilson
 * interval, against 2 chi Gamma / B_0. Gamma defaults to the empirical mean of
 * ||u||_2 when not given.
 */
StationaryReport stationary_check(std::span<const DiagnosticsStream> streams, double chi,
                                  std::optional<double> gamma, double b0,
                                  double burn_in_fraction = 0.2);

struct BalanceReport {
    double burn_in_tau = 0.0;
    double end_tau = 0.0;
    double avg_h1_sq = 0.0;
    double se = 0.0;  // batch means
    std::size_t batches = 0;
    double b0 = 0.0;
    double relative_residual = 0.0;  // NaN when degenerate
    bool degenerate = false;
    bool short_window = false;  // post-burn-in slow time < min_slow_window
};

/// Time-and-ensemble average of ||u||_1^2 after burn-in vs B_0, 20 batch means.
BalanceReport balance_check(std::span<const DiagnosticsStream> streams, double burn_in_fraction,
                            double b0, double min_slow_window = 5.0);

/// Time-and-ensemble mean of ||u||_m^2 after burn-in with a batch-means error.
struct MomentEstimate {
    double mean = 0.0;
    double se = 0.0;
};
MomentEstimate stationary_moment(std::span<const DiagnosticsStream> streams, double m,
                                 double burn_in_fraction, std::size_t batches = 20);

/// nu int_{t0}^{t0 + 1/nu} ||u(s)||_m^2 ds by left rectangles at the record cadence.
double time_avg_sobolev(const DiagnosticsStream& s, double m, double t0);

/// Maximum of a record quantity over fast-time window [t0, t1).
enum class RecordField { norm, sup, cm };
double window_max(const DiagnosticsStream& s, RecordField field, double m, double t0, double t1);

struct ExpMoment {
    double value = 1.0;
    double half_value = 1.0;  // same estimator on the first half of the samples
    bool stable = true;       // |half - full| <= 0.2 full
};

/// Sample mean of exp(c x^2).
ExpMoment exp_moment(std::span<const double> samples, double c);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};
/// 95% Wilson score interval for k successes in n trials.
Interval wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054);

}  // namespace cascade
