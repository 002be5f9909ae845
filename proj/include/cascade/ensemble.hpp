#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cascade/diagnostics.hpp"
#include "cascade/forcing.hpp"
#include "cascade/integrators.hpp"

namespace cascade {

/// Serial is the reference path; parallel distributes trajectories over OpenMP threads.
enum class Execution { serial, parallel };

class AbortFractionExceeded : public Error {
  public:
    AbortFractionExceeded(std::size_t aborted, std::size_t members)
        : Error(std::to_string(aborted) + " of " + std::to_string(members) +
                " trajectories aborted (limit 1%)"),
          aborted_(aborted) {}
    std::size_t aborted() const { return aborted_; }

  private:
    std::size_t aborted_;
};

struct EnsembleTask {
    NoiseSpec spec;
    SimParams params;  // seed is the base seed; stream_id is set per member
    std::size_t members = 2;
    RecorderConfig recorder;
    SpectralField u0;
    /// When set, member i starts from smooth_random_field(grid, q, stream i) instead of u0.
    std::optional<double> random_initial_decay;
    double max_abort_fraction = 0.01;
};

struct EnsembleRun {
    std::vector<DiagnosticsStream> streams;  // stream_id order
    std::size_t aborted = 0;
};

/**
 * Runs members 0..M-1 with stream_id = member index. Each trajectory is
 * sequential and writes only its own slot, so both executions give identical
 * streams. Throws AbortFractionExceeded past the abort limit.
 */
EnsembleRun run_ensemble(const EnsembleTask& task, Execution exec = Execution::parallel);

enum class ObservableKind { sup_sobolev, time_avg_sobolev, sup_cm, sup_inf_norm };

struct Observable {
    ObservableKind kind = ObservableKind::sup_sobolev;
    int m = 0;

    /// "sup_sobolev(2)", "time_avg_sobolev(2)", "sup_cm(2)", "sup_inf_norm".
    static Observable parse(const std::string& text);
    std::string name() const;
    friend bool operator==(const Observable&, const Observable&) = default;
};

/// Fast-time window [t0, t1) over which per-trajectory observables are taken.
struct ObservationWindow {
    double t0 = 0.0;
    double t1 = 0.0;
};

/// Recorder settings that make every observable computable.
RecorderConfig recorder_for(std::span<const Observable> obs);

double evaluate_observable(const Observable& obs, const DiagnosticsStream& s, const ObservationWindow& w);

struct ObservableSummary {
    std::string name;
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;
    double se = 0.0;
    std::array<double, 5> quantiles{};  // 5, 25, 50, 75, 95 %

    double median() const { return quantiles[2]; }
};

struct EnsembleSummary {
    double nu = 0.0;
    std::size_t members = 0;
    std::size_t aborted = 0;
    std::vector<ObservableSummary> observables;
};

/// Linear-interpolated (type 7) quantile of unsorted data.
double quantile(std::vector<double> xs, double p);
ObservableSummary summarize(const std::string& name, std::span<const double> values);

struct EnsembleResult {
    EnsembleSummary summary;
    std::vector<std::vector<double>> values;  // per observable, per live trajectory
    EnsembleRun run;
};

EnsembleResult ensemble_run(const EnsembleTask& task, std::span<const Observable> obs,
                            const ObservationWindow& window, Execution exec = Execution::parallel);

}  // namespace cascade
