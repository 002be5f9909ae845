#include "cascade/experiments.hpp"

#include <algorithm>
#include <cmath>

namespace cascade {

ScalingFit fit_exponent(std::span<const ScalingPoint> points) {
    if (points.size() < 3) throw Error("fit_exponent: need at least 3 points");
    for (const auto& p : points) {
        if (!(p.nu > 0.0)) throw Error("fit_exponent: nu must be > 0");
        if (!(p.q > 0.0)) throw Error("fit_exponent: observable must be > 0");
    }
    const double n = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& p : points) {
        sx += -std::log(p.nu);
        sy += std::log(p.q);
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& p : points) {
        const double dx = -std::log(p.nu) - mx;
        const double dy = std::log(p.q) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0) throw Error("fit_exponent: need at least two distinct nu values");
    ScalingFit fit;
    fit.points.assign(points.begin(), points.end());
    fit.alpha = sxy / sxx;
    fit.intercept = my - fit.alpha * mx;
    const double ss_res = std::max(0.0, syy - fit.alpha * sxy);
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

void SweepPlan::validate() const {
    if (nu_grid.empty()) throw Error("sweep: empty nu grid");
    for (std::size_t i = 0; i < nu_grid.size(); ++i) {
        if (!(nu_grid[i] > 0.0 && nu_grid[i] <= 1.0)) throw Error("sweep: nu values must lie in (0, 1]");
        if (i > 0 && !(nu_grid[i] < nu_grid[i - 1])) throw Error("sweep: nu grid must be strictly decreasing");
    }
    if (members < 2) throw Error("sweep: ensemble size M must be >= 2");
    if (observables.empty()) throw Error("sweep: no observables");
    if (!(window_length > 0.0) || window_start < 0.0) throw Error("sweep: bad observation window");
}

double shared_dt(const SimParams& sim, const GridSpec& grid, const std::vector<double>& nu_grid, double nu,
                 bool shared) {
    const auto base = [&](double v) { return sim.dt > 0.0 ? sim.dt : default_dt(sim.scheme, v, grid); };
    if (!shared || nu_grid.empty()) return base(nu);
    const double nu_min = *std::min_element(nu_grid.begin(), nu_grid.end());
    return base(nu_min) * nu_min / nu;
}

EnsembleTask sweep_task(const SweepPlan& plan, double nu) {
    EnsembleTask task;
    task.spec = NoiseSpec(plan.grid, plan.noise);
    task.params = plan.sim;
    task.params.nu = nu;
    task.params.T = plan.horizon_slow() / nu;
    task.params.dt = shared_dt(plan.sim, plan.grid, plan.nu_grid, nu, plan.shared_slow_path);
    task.members = plan.members;
    task.recorder = recorder_for(plan.observables);
    task.u0 = policy_initial(plan.grid, nu, plan.initial);
    return task;
}

namespace {

bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) return false;
    return true;
}

bool is_sobolev(const Observable& o) {
    return o.kind == ObservableKind::sup_sobolev || o.kind == ObservableKind::time_avg_sobolev;
}

}  // namespace

SweepReport nu_sweep(const SweepPlan& plan, Execution exec, const SweepCallback& on_entry) {
    plan.validate();
    SweepReport rep;
    rep.plan = plan;
    rep.fit_refused = plan.nu_grid.size() < 3;
    rep.verdicts.resize(plan.observables.size());
    for (std::size_t i = 0; i < plan.observables.size(); ++i) rep.verdicts[i].observable = plan.observables[i];

    for (std::size_t k = 0; k < plan.nu_grid.size(); ++k) {
        const double nu = plan.nu_grid[k];
        const EnsembleTask task = sweep_task(plan, nu);
        const ObservationWindow window{plan.window_start / nu, plan.horizon_slow() / nu};
        EnsembleResult res = ensemble_run(task, plan.observables, window, exec);
        for (std::size_t i = 0; i < plan.observables.size(); ++i) {
            const ObservableSummary& s = res.summary.observables[i];
            rep.verdicts[i].means.push_back(s.mean);
            rep.verdicts[i].ses.push_back(s.se);
            rep.verdicts[i].medians.push_back(s.median());
            if (plan.observables[i].kind == ObservableKind::sup_inf_norm)
                rep.verdicts[i].exp_moments.push_back(exp_moment(res.values[i], kExpMomentC));
        }
        rep.entries.push_back(res.summary);
        if (on_entry) on_entry(k, res);
    }

    for (ObservableVerdict& v : rep.verdicts) {
        v.monotone_means = strictly_increasing(v.means);
        v.monotone_medians = strictly_increasing(v.medians);
        const auto [lo, hi] = std::minmax_element(v.medians.begin(), v.medians.end());
        v.median_spread = *lo > 0.0 ? *hi / *lo : INFINITY;
        if (rep.fit_refused) continue;
        std::vector<ScalingPoint> pts;
        bool positive = true;
        for (std::size_t k = 0; k < plan.nu_grid.size(); ++k) {
            pts.push_back({plan.nu_grid[k], v.means[k], v.ses[k]});
            positive = positive && v.means[k] > 0.0;
        }
        if (!positive) continue;
        v.fit = fit_exponent(pts);
        v.positive_ok = v.fit->alpha > 0.0;
        if (is_sobolev(v.observable)) v.upper_ok = v.fit->alpha <= v.observable.m + plan.slack;
    }
    return rep;
}

bool verdict_passed(const ObservableVerdict& v) {
    switch (v.observable.kind) {
        case ObservableKind::sup_sobolev:
        case ObservableKind::time_avg_sobolev:
            return v.monotone_means && v.positive_ok.value_or(true) && v.upper_ok.value_or(true);
        case ObservableKind::sup_cm: return v.monotone_medians;
        case ObservableKind::sup_inf_norm: return v.median_spread < kSupSpreadLimit;
    }
    return false;
}

void StationaryPlan::validate() const {
    if (nu_grid.empty()) throw Error("stationary: empty nu grid");
    for (std::size_t i = 0; i < nu_grid.size(); ++i) {
        if (!(nu_grid[i] > 0.0 && nu_grid[i] <= 1.0)) throw Error("stationary: nu values must lie in (0, 1]");
        if (i > 0 && !(nu_grid[i] < nu_grid[i - 1])) throw Error("stationary: nu grid must be strictly decreasing");
    }
    if (members < 2) throw Error("stationary: ensemble size M must be >= 2");
    if (horizon_slow * (1.0 - burn_in) < min_post_burn_in)
        throw Error("stationary: run length after burn-in is below the required slow-time length");
}

EnsembleTask stationary_task(const StationaryPlan& plan, double nu) {
    EnsembleTask task;
    task.spec = NoiseSpec(plan.grid, plan.noise);
    task.params = plan.sim;
    task.params.nu = nu;
    task.params.T = plan.horizon_slow / nu;
    task.params.dt = shared_dt(plan.sim, plan.grid, plan.nu_grid, nu, plan.shared_slow_path);
    task.members = plan.members;
    for (double m : plan.moment_orders)
        if (std::find(task.recorder.norm_orders.begin(), task.recorder.norm_orders.end(), m) ==
            task.recorder.norm_orders.end())
            task.recorder.norm_orders.push_back(m);
    task.u0 = policy_initial(plan.grid, nu, plan.initial);
    return task;
}

StationarySweepReport stationary_sweep(const StationaryPlan& plan, Execution exec,
                                       const StationaryCallback& on_entry) {
    plan.validate();
    StationarySweepReport rep;
    rep.plan = plan;
    const NoiseSpec spec(plan.grid, plan.noise);
    const double b0 = spec.bk_sum(0.0);
    rep.degenerate = !spec.nondegenerate();

    for (std::size_t k = 0; k < plan.nu_grid.size(); ++k) {
        const double nu = plan.nu_grid[k];
        const EnsembleRun run = run_ensemble(stationary_task(plan, nu), exec);
        StationaryEntry e;
        e.nu = nu;
        e.aborted = run.aborted;
        e.balance = balance_check(run.streams, plan.burn_in, b0, plan.min_post_burn_in);
        for (double m : plan.moment_orders)
            e.moments.push_back(stationary_moment(run.streams, m, plan.burn_in));
        rep.entries.push_back(std::move(e));
        if (on_entry) on_entry(k, run);
    }

    const double kappa = plan.initial.kappa;
    for (std::size_t j = 0; j < plan.moment_orders.size(); ++j) {
        MomentBracket b;
        b.m = plan.moment_orders[j];
        b.lower_exponent = 2.0 * b.m * kappa - 1.0;
        b.upper_exponent = b.m;
        bool positive = true;
        std::vector<ScalingPoint> pts;
        for (const auto& e : rep.entries) {
            const double q = e.moments[j].mean;
            positive = positive && q > 0.0;
            pts.push_back({e.nu, q, e.moments[j].se});
            if (q > 0.0) {
                b.c_upper = std::max(b.c_upper, q / std::pow(e.nu, -b.m));
                b.c_lower = std::max(b.c_lower, std::pow(e.nu, 1.0 - 2.0 * b.m * kappa) / q);
            }
        }
        if (positive && pts.size() >= 3) {
            b.fit = fit_exponent(pts);
            b.consistent = b.fit->alpha >= b.lower_exponent && b.fit->alpha <= b.upper_exponent;
        }
        rep.brackets.push_back(b);
    }
    return rep;
}

double linear_stationary_moment(const NoiseSpec& spec, double m) { return spec.bk_sum(m - 1.0); }

}  // namespace cascade
