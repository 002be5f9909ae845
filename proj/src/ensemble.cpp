#include "cascade/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

namespace cascade {

namespace {

DiagnosticsStream run_member(const EnsembleTask& task, std::uint64_t member) {
    SimParams p = task.params;
    p.stream_id = member;
    const SpectralField u0 = task.random_initial_decay
                                 ? smooth_random_field(task.spec.grid(), *task.random_initial_decay,
                                                       RngStream(p.seed, member))
                                 : task.u0;
    Recorder rec(task.spec.grid(), task.recorder, p);
    try {
        run_trajectory(u0, task.spec, p, rec.sink());
    } catch (const TrajectoryAborted& e) {
        rec.stream().aborted = true;
        rec.stream().abort_time = e.last_good_time();
    }
    return rec.take();
}

}  // namespace

EnsembleRun run_ensemble(const EnsembleTask& task, Execution exec) {
    if (task.members < 1) throw Error("ensemble: need at least one member");
    task.params.validate();
    if (!task.random_initial_decay) require_same_grid(task.u0.grid(), task.spec.grid(), "ensemble");

    EnsembleRun out;
    out.streams.resize(task.members);
    const auto M = static_cast<std::int64_t>(task.members);
    if (exec == Execution::serial) {
        for (std::int64_t i = 0; i < M; ++i)
            out.streams[static_cast<std::size_t>(i)] = run_member(task, static_cast<std::uint64_t>(i));
    } else {
        std::vector<std::exception_ptr> errors(task.members);
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t i = 0; i < M; ++i) {
            try {
                out.streams[static_cast<std::size_t>(i)] = run_member(task, static_cast<std::uint64_t>(i));
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    for (const auto& s : out.streams) out.aborted += s.aborted ? 1 : 0;
    if (static_cast<double>(out.aborted) > task.max_abort_fraction * static_cast<double>(task.members))
        throw AbortFractionExceeded(out.aborted, task.members);
    return out;
}

Observable Observable::parse(const std::string& text) {
    if (text == "sup_inf_norm") return {ObservableKind::sup_inf_norm, 0};
    const auto open = text.find('(');
    if (open == std::string::npos || text.back() != ')')
        throw Error("unknown observable '" + text + "'");
    const std::string head = text.substr(0, open);
    const std::string arg = text.substr(open + 1, text.size() - open - 2);
    int m = 0;
    try {
        std::size_t used = 0;
        m = std::stoi(arg, &used);
        if (used != arg.size() || m < 0) throw Error("");
    } catch (...) {
        throw Error("observable '" + text + "': order must be a nonnegative integer");
    }
    if (head == "sup_sobolev") return {ObservableKind::sup_sobolev, m};
    if (head == "time_avg_sobolev") return {ObservableKind::time_avg_sobolev, m};
    if (head == "sup_cm") return {ObservableKind::sup_cm, m};
    throw Error("unknown observable '" + text + "'");
}

std::string Observable::name() const {
    switch (kind) {
        case ObservableKind::sup_sobolev: return "sup_sobolev(" + std::to_string(m) + ")";
        case ObservableKind::time_avg_sobolev: return "time_avg_sobolev(" + std::to_string(m) + ")";
        case ObservableKind::sup_cm: return "sup_cm(" + std::to_string(m) + ")";
        case ObservableKind::sup_inf_norm: return "sup_inf_norm";
    }
    return {};
}

RecorderConfig recorder_for(std::span<const Observable> obs) {
    RecorderConfig cfg;
    for (const Observable& o : obs) {
        if (o.kind == ObservableKind::sup_sobolev || o.kind == ObservableKind::time_avg_sobolev) {
            const double m = o.m;
            if (std::find(cfg.norm_orders.begin(), cfg.norm_orders.end(), m) == cfg.norm_orders.end())
                cfg.norm_orders.push_back(m);
        } else if (o.kind == ObservableKind::sup_cm) {
            if (cfg.cm_order >= 0 && cfg.cm_order != o.m)
                throw Error("observables: only one C^m order per run is supported");
            cfg.cm_order = o.m;
        }
    }
    return cfg;
}

double evaluate_observable(const Observable& obs, const DiagnosticsStream& s, const ObservationWindow& w) {
    switch (obs.kind) {
        case ObservableKind::sup_sobolev: return window_max(s, RecordField::norm, obs.m, w.t0, w.t1);
        case ObservableKind::time_avg_sobolev: return time_avg_sobolev(s, obs.m, w.t0);
        case ObservableKind::sup_cm: return window_max(s, RecordField::cm, obs.m, w.t0, w.t1);
        case ObservableKind::sup_inf_norm: return window_max(s, RecordField::sup, 0.0, w.t0, w.t1);
    }
    return 0.0;
}

double quantile(std::vector<double> xs, double p) {
    if (xs.empty()) throw Error("quantile of empty sample");
    std::sort(xs.begin(), xs.end());
    const double h = p * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

ObservableSummary summarize(const std::string& name, std::span<const double> values) {
    ObservableSummary s;
    s.name = name;
    s.count = values.size();
    if (values.empty()) return s;
    const double n = static_cast<double>(values.size());
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.variance = values.size() > 1 ? ss / (n - 1.0) : 0.0;
    s.se = std::sqrt(s.variance / n);
    const std::vector<double> xs(values.begin(), values.end());
    const double ps[5] = {0.05, 0.25, 0.5, 0.75, 0.95};
    for (int i = 0; i < 5; ++i) s.quantiles[static_cast<std::size_t>(i)] = quantile(xs, ps[i]);
    return s;
}

EnsembleResult ensemble_run(const EnsembleTask& task, std::span<const Observable> obs,
                            const ObservationWindow& window, Execution exec) {
    EnsembleTask t = task;
    const RecorderConfig needed = recorder_for(obs);
    for (double m : needed.norm_orders)
        if (std::find(t.recorder.norm_orders.begin(), t.recorder.norm_orders.end(), m) ==
            t.recorder.norm_orders.end())
            t.recorder.norm_orders.push_back(m);
    if (needed.cm_order >= 0) t.recorder.cm_order = needed.cm_order;

    EnsembleResult res;
    res.run = run_ensemble(t, exec);
    res.summary.nu = t.params.nu;
    res.summary.members = t.members;
    res.summary.aborted = res.run.aborted;
    res.values.resize(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
        for (const auto& s : res.run.streams)
            if (!s.aborted) res.values[i].push_back(evaluate_observable(obs[i], s, window));
        res.summary.observables.push_back(summarize(obs[i].name(), res.values[i]));
    }
    return res;
}

}  // namespace cascade
