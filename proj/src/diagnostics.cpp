#include "cascade/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cascade/norms.hpp"

namespace cascade {

namespace {

constexpr double kTimeEps = 1e-9;

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

std::vector<const DiagnosticsStream*> live_streams(std::span<const DiagnosticsStream> streams) {
    std::vector<const DiagnosticsStream*> out;
    for (const auto& s : streams)
        if (!s.aborted && !s.records.empty()) out.push_back(&s);
    if (out.empty()) throw Error("diagnostics: empty ensemble");
    return out;
}

// First record index at or after the burn-in point of a stream.
std::size_t burn_in_index(const DiagnosticsStream& s, double fraction) {
    if (fraction < 0.0 || fraction >= 1.0) throw Error("diagnostics: burn-in fraction must be in [0, 1)");
    const double start = s.records.front().t;
    const double end = s.records.back().t;
    const double cut = start + fraction * (end - start);
    std::size_t k = 0;
    while (k < s.records.size() && s.records[k].t < cut - kTimeEps * std::max(1.0, s.sample_dt)) ++k;
    return k;
}

}  // namespace

std::size_t DiagnosticsStream::norm_column(double m) const {
    for (std::size_t i = 0; i < norm_orders.size(); ++i)
        if (norm_orders[i] == m) return i;
    throw Error("diagnostics: stream does not record ||u||_" + std::to_string(m));
}

Recorder::Recorder(const GridSpec& grid, RecorderConfig cfg, const SimParams& params)
    : cfg_(std::move(cfg)), tr_(grid) {
    stream_.stream_id = params.stream_id;
    stream_.nu = params.nu;
    stream_.sample_dt = params.dt * params.record_every;
    stream_.norm_orders = cfg_.norm_orders;
    stream_.cm_order = cfg_.cm_order;
    stream_.has_shells = cfg_.shells;
    stream_.records.reserve(params.total_steps() / static_cast<std::uint64_t>(params.record_every) + 2);
}

void Recorder::operator()(const TrajectoryState& st) {
    DiagnosticsRecord rec;
    rec.t = st.t;
    rec.tau = stream_.nu * st.t;
    rec.norms.reserve(cfg_.norm_orders.size());
    for (double m : cfg_.norm_orders) rec.norms.push_back(sobolev_norm(st.u, m));
    rec.sup = sup_norm(st.u, tr_);
    if (cfg_.cm_order >= 0) rec.cm = cm_norm(st.u, cfg_.cm_order, tr_);
    if (cfg_.shells)
        for (const Shell& sh : spectrum_shells(st.u)) rec.shells.push_back(sh.energy);
    stream_.records.push_back(std::move(rec));
}

OccupationReport occupation_check(std::span<const DiagnosticsStream> streams, double chi,
                                  double gamma, double tau0, double tau, double b0) {
    if (!(chi > 0.0) || !(gamma > 0.0)) throw Error("occupation_check: chi and Gamma must be > 0");
    if (!(tau > tau0)) throw Error("occupation_check: need tau > tau0");
    if (!(b0 > 0.0)) throw Error("occupation_check: B_0 must be > 0");
    const auto live = live_streams(streams);

    OccupationReport rep;
    rep.chi = chi;
    rep.gamma = gamma;
    rep.tau0 = tau0;
    rep.tau = tau;
    rep.b0 = b0;
    rep.rhs_bound = 2.0 * (1.0 + tau) * chi * gamma / b0;

    std::vector<double> lhs;
    for (const DiagnosticsStream* s : live) {
        const std::size_t c0 = s->norm_column(0.0);
        const std::size_t c2 = s->norm_column(2.0);
        const double dtau = s->sample_dtau();
        const double eps = kTimeEps * std::max(1.0, dtau);
        if (s->records.front().tau > tau0 + eps || s->records.back().tau + dtau < tau - eps)
            throw Error("occupation_check: stream " + std::to_string(s->stream_id) +
                        " does not cover the window");
        double stop = tau;
        for (const auto& r : s->records) {
            if (r.tau < tau0 - eps) continue;
            if (r.norms[c2] >= gamma) {
                stop = std::min(stop, r.tau);
                break;
            }
        }
        if (stop < tau) ++rep.capped;
        std::size_t hits = 0;
        for (const auto& r : s->records)
            if (r.tau >= tau0 - eps && r.tau < stop - eps && r.norms[c0] <= chi) ++hits;
        lhs.push_back(static_cast<double>(hits) * dtau);
    }
    rep.trajectories = lhs.size();
    rep.lhs_estimate = mean_of(lhs);
    rep.lhs_se = standard_error(lhs);
    rep.pass = rep.lhs_estimate <= rep.rhs_bound + 2.0 * rep.lhs_se;
    return rep;
}

Interval wilson_interval(std::size_t k, std::size_t n, double z) {
    if (n == 0) throw Error("wilson_interval: no trials");
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {k == 0 ? 0.0 : std::max(0.0, centre - half), k == n ? 1.0 : std::min(1.0, centre + half)};
}

StationaryReport stationary_check(std::span<const DiagnosticsStream> streams, double chi,
                                  std::optional<double> gamma, double b0, double burn_in_fraction) {
    if (chi < 0.0) throw Error("stationary_check: chi must be >= 0");
    if (!(b0 > 0.0)) throw Error("stationary_check: B_0 must be > 0");
    const auto live = live_streams(streams);
    std::size_t hits = 0;
    std::size_t total = 0;
    double h2_sum = 0.0;
    for (const DiagnosticsStream* s : live) {
        const std::size_t c0 = s->norm_column(0.0);
        const std::size_t c2 = s->norm_column(2.0);
        for (std::size_t k = burn_in_index(*s, burn_in_fraction); k < s->records.size(); ++k) {
            const auto& r = s->records[k];
            if (r.norms[c0] <= chi) ++hits;
            h2_sum += r.norms[c2];
            ++total;
        }
    }
    if (total == 0) throw Error("stationary_check: empty sample");
    StationaryReport rep;
    rep.chi = chi;
    rep.gamma = gamma.value_or(h2_sum / static_cast<double>(total));
    rep.samples = total;
    rep.frequency = static_cast<double>(hits) / static_cast<double>(total);
    const Interval ci = wilson_interval(hits, total);
    rep.wilson_lo = ci.lo;
    rep.wilson_hi = ci.hi;
    rep.bound = 2.0 * chi * rep.gamma / b0;
    rep.applicable = rep.bound < 1.0;
    rep.pass = !rep.applicable || rep.wilson_lo <= rep.bound;
    return rep;
}

namespace {

struct Batched {
    double mean = 0.0;
    double se = 0.0;
    std::size_t batches = 0;
    double start_tau = 0.0;
    double end_tau = 0.0;
};

// Pooled mean of ||u||_m^2 and batch-means error over contiguous record blocks.
Batched batch_means(const std::vector<const DiagnosticsStream*>& live, double m,
                    double burn_in_fraction, std::size_t want_batches) {
    const DiagnosticsStream& first = *live.front();
    const std::size_t k0 = burn_in_index(first, burn_in_fraction);
    const std::size_t K = first.records.size();
    for (const auto* s : live)
        if (s->records.size() != K) throw Error("diagnostics: streams have different lengths");
    const std::size_t count = K - k0;
    if (count < 2) throw Error("diagnostics: window too short (< 2 batches)");
    const std::size_t nb = std::min(want_batches, count);
    const std::size_t col = first.norm_column(m);

    Batched out;
    out.batches = nb;
    out.start_tau = first.records[k0].tau;
    out.end_tau = first.records.back().tau + first.sample_dtau();
    std::vector<double> batch(nb, 0.0);
    std::vector<std::size_t> batch_n(nb, 0);
    double total = 0.0;
    std::size_t n = 0;
    for (const auto* s : live) {
        for (std::size_t k = k0; k < K; ++k) {
            const double v = s->records[k].norms[col] * s->records[k].norms[col];
            const std::size_t b = (k - k0) * nb / count;
            batch[b] += v;
            ++batch_n[b];
            total += v;
            ++n;
        }
    }
    for (std::size_t b = 0; b < nb; ++b) batch[b] /= static_cast<double>(batch_n[b]);
    out.mean = total / static_cast<double>(n);
    out.se = standard_error(batch);
    return out;
}

}  // namespace

BalanceReport balance_check(std::span<const DiagnosticsStream> streams, double burn_in_fraction,
                            double b0, double min_slow_window) {
    const auto live = live_streams(streams);
    const Batched bm = batch_means(live, 1.0, burn_in_fraction, 20);
    BalanceReport rep;
    rep.burn_in_tau = bm.start_tau;
    rep.end_tau = bm.end_tau;
    rep.avg_h1_sq = bm.mean;
    rep.se = bm.se;
    rep.batches = bm.batches;
    rep.b0 = b0;
    rep.degenerate = !(b0 > 0.0);
    rep.relative_residual = rep.degenerate ? std::numeric_limits<double>::quiet_NaN()
                                           : std::abs(bm.mean - b0) / b0;
    rep.short_window = bm.end_tau - bm.start_tau < min_slow_window;
    return rep;
}

MomentEstimate stationary_moment(std::span<const DiagnosticsStream> streams, double m,
                                 double burn_in_fraction, std::size_t batches) {
    const Batched bm = batch_means(live_streams(streams), m, burn_in_fraction, batches);
    return {bm.mean, bm.se};
}

double time_avg_sobolev(const DiagnosticsStream& s, double m, double t0) {
    if (s.records.empty()) throw Error("time_avg_sobolev: empty stream");
    const double len = 1.0 / s.nu;
    const double eps = kTimeEps * std::max(1.0, s.sample_dt);
    if (s.records.front().t > t0 + eps || s.records.back().t + s.sample_dt < t0 + len - eps)
        throw Error("time_avg_sobolev: stream does not cover [t0, t0 + 1/nu]");
    const std::size_t col = s.norm_column(m);
    double acc = 0.0;
    for (const auto& r : s.records)
        if (r.t >= t0 - eps && r.t < t0 + len - eps) acc += r.norms[col] * r.norms[col];
    return s.nu * acc * s.sample_dt;
}

double window_max(const DiagnosticsStream& s, RecordField field, double m, double t0, double t1) {
    const double eps = kTimeEps * std::max(1.0, s.sample_dt);
    const std::size_t col = field == RecordField::norm ? s.norm_column(m) : 0;
    if (field == RecordField::cm && s.cm_order != static_cast<int>(m))
        throw Error("window_max: stream does not record the requested C^m norm");
    double best = -1.0;
    for (const auto& r : s.records) {
        if (r.t < t0 - eps || r.t >= t1 - eps) continue;
        double v = 0.0;
        switch (field) {
            case RecordField::norm: v = r.norms[col]; break;
            case RecordField::sup: v = r.sup; break;
            case RecordField::cm: v = r.cm.value_or(0.0); break;
        }
        best = std::max(best, v);
    }
    if (best < 0.0) throw Error("window_max: no samples in window");
    return best;
}

ExpMoment exp_moment(std::span<const double> samples, double c) {
    if (c < 0.0) throw Error("exp_moment: c must be >= 0");
    ExpMoment out;
    if (samples.empty()) return out;
    auto mean_exp = [c](std::span<const double> xs) {
        double s = 0.0;
        for (double x : xs) s += std::exp(c * x * x);
        return s / static_cast<double>(xs.size());
    };
    out.value = mean_exp(samples);
    const std::size_t half = std::max<std::size_t>(1, samples.size() / 2);
    out.half_value = mean_exp(samples.first(half));
    out.stable = std::abs(out.half_value - out.value) <= 0.2 * out.value;
    return out;
}

}  // namespace cascade
