#include "cascade/integrators.hpp"

#include <cmath>

namespace cascade {

namespace {

double ou_noise_scale(double lambda, double h) {
    // sqrt((1 - e^{-2 lambda h}) / (2 lambda h)); lambda h > 0 always
    const double x = 2.0 * lambda * h;
    return std::sqrt(-std::expm1(-x) / x);
}

}  // namespace

Scheme parse_scheme(const std::string& s) {
    if (s == "strang") return Scheme::strang;
    if (s == "em") return Scheme::em;
    throw Error("unknown scheme '" + s + "' (expected strang or em)");
}

const char* to_string(Scheme s) { return s == Scheme::strang ? "strang" : "em"; }

void SimParams::validate() const {
    if (!(nu > 0.0 && nu <= 1.0)) throw Error("sim: nu must be in (0, 1]");
    if (!(dt > 0.0)) throw Error("sim: dt must be > 0");
    if (!(T >= dt)) throw Error("sim: T must be >= dt");
    if (record_every < 1) throw Error("sim: record_every must be >= 1");
    if (path_refinement < 1) throw Error("sim: path_refinement must be >= 1");
}

std::uint64_t SimParams::total_steps() const {
    return static_cast<std::uint64_t>(std::ceil(T / dt - 1e-9));
}

double default_dt(Scheme scheme, double nu, const GridSpec& grid) {
    if (scheme == Scheme::strang) return 0.01;
    const double D = grid.modes();
    return 0.5 * std::min(0.01, 0.5 / (nu * D * D));
}

void ou_exact_step(SpectralField& u, const NoiseSpec& spec, double nu, double h,
                   const SpectralField& increment) {
    if (!(h > 0.0)) throw Error("ou_exact_step: step must be > 0");
    require_same_grid(u.grid(), spec.grid(), "ou_exact_step");
    require_same_grid(u.grid(), increment.grid(), "ou_exact_step");
    const auto& w = u.grid().mode_norm_sq();
    const double sq = std::sqrt(nu);
    for (std::size_t r = 0; r < w.size(); ++r) {
        const double lambda = nu * w[r];
        u[r] = std::exp(-lambda * h) * u[r] + sq * ou_noise_scale(lambda, h) * increment[r];
    }
}

SpectralField ou_exact_step(const SpectralField& u, const NoiseSpec& spec, double nu, double h,
                            RngStream& rng) {
    SpectralField out = u;
    ou_exact_step(out, spec, nu, h, sample_increments(spec, h, rng));
    return out;
}

void phase_rotate_lattice(PhysicalField& p, double h) {
    for (Complex& z : p.values()) {
        const double theta = -std::norm(z) * h;
        z *= Complex{std::cos(theta), std::sin(theta)};
    }
}

SpectralField phase_rotation_step(const SpectralField& u, double h, const SineTransform& tr) {
    if (h < 0.0) throw Error("phase_rotation_step: step must be >= 0");
    PhysicalField p = tr.to_physical(u);
    phase_rotate_lattice(p, h);
    return tr.to_spectral(p);
}

SpectralField phase_rotation_step(const SpectralField& u, double h) {
    return phase_rotation_step(u, h, SineTransform(u.grid()));
}

SpectralField cubic_term(const SpectralField& u, const SineTransform& tr) {
    PhysicalField p = tr.to_physical(u);
    for (Complex& z : p.values()) z *= std::norm(z);
    return tr.to_spectral(p);
}

Stepper::Stepper(const NoiseSpec& spec, const SimParams& params)
    : spec_(spec), params_(params), tr_(spec.grid()), noise_(spec.grid()), scratch_(spec.grid()),
      lattice_(spec.grid()) {
    params_.validate();
    const auto& w = spec.grid().mode_norm_sq();
    const double h = 0.5 * params_.dt;
    half_decay_.resize(w.size());
    double wmax = 0.0;
    for (std::size_t r = 0; r < w.size(); ++r) {
        const double lambda = params_.nu * w[r];
        half_decay_[r] = std::exp(-lambda * h);
        wmax = std::max(wmax, w[r]);
    }
    const std::uint64_t R = params_.path_refinement;
    const double cell_dt = h / static_cast<double>(R);
    const auto& active = spec.active_modes();
    cell_weight_.assign(active.size() * R, 0.0);
    for (std::size_t a = 0; a < active.size(); ++a) {
        const std::size_t r = active[a];
        const double lambda = params_.nu * w[r];
        double* wt = &cell_weight_[a * R];
        double sum_sq = 0.0;
        for (std::uint64_t c = 0; c < R; ++c) {
            wt[c] = std::exp(-lambda * (h - (static_cast<double>(c) + 0.5) * cell_dt));
            sum_sq += wt[c] * wt[c] * cell_dt;
        }
        // rescale so the half-step noise has the exact OU variance (1 - e^{-2 lambda h}) / (2 lambda)
        const double target = ou_noise_scale(lambda, h) * ou_noise_scale(lambda, h) * h;
        const double k = std::sqrt(params_.nu * target / sum_sq) * spec.amplitude(r) * std::sqrt(cell_dt);
        for (std::uint64_t c = 0; c < R; ++c) wt[c] *= k;
    }
    em_unstable_ = params_.scheme == Scheme::em && params_.nu * wmax * params_.dt >= 1.0;
}

void Stepper::step(TrajectoryState& st) {
    if (params_.scheme == Scheme::strang)
        strang_step(st);
    else
        em_step(st);
}

void Stepper::strang_step(TrajectoryState& st) {
    const std::uint64_t R = params_.path_refinement;
    const double prev_t = st.t;
    auto u = st.u.coeffs();
    for (int half = 0; half < 2; ++half) {
        const std::uint64_t first = R * (2 * st.step_index + static_cast<std::uint64_t>(half));
        for (std::size_t r = 0; r < u.size(); ++r) u[r] *= half_decay_[r];
        const auto& active = spec_.active_modes();
        for (std::size_t a = 0; a < active.size(); ++a) {
            const double* wt = &cell_weight_[a * R];
            double re = 0.0;
            double im = 0.0;
            for (std::uint64_t c = 0; c < R; ++c) {
                const auto [gr, gi] = st.rng.gaussian_pair(first + c, active[a]);
                re += wt[c] * gr;
                im += wt[c] * gi;
            }
            u[active[a]] += Complex{re, im};
        }
        if (half == 0 && params_.nonlinear) {
            tr_.to_physical(st.u, lattice_);
            phase_rotate_lattice(lattice_, params_.dt);
            tr_.to_spectral(lattice_, st.u);
        }
    }
    ++st.step_index;
    st.t = static_cast<double>(st.step_index) * params_.dt;
    st.rng.set_counter(2 * R * st.step_index);
    check_finite(st, prev_t);
}

void Stepper::em_step(TrajectoryState& st) {
    const std::uint64_t R = params_.path_refinement;
    const double dt = params_.dt;
    const double prev_t = st.t;
    path_increment(spec_, st.rng, 2 * R * st.step_index, 2 * R, dt / static_cast<double>(2 * R), noise_);
    const auto& w = st.u.grid().mode_norm_sq();
    auto u = st.u.coeffs();
    if (params_.nonlinear) {
        tr_.to_physical(st.u, lattice_);
        for (Complex& z : lattice_.values()) z *= std::norm(z);
        tr_.to_spectral(lattice_, scratch_);
    }
    const double sq = std::sqrt(params_.nu);
    const Complex minus_i{0.0, -1.0};
    for (std::size_t r = 0; r < u.size(); ++r) {
        Complex drift = -params_.nu * w[r] * u[r];
        if (params_.nonlinear) drift += minus_i * scratch_[r];
        u[r] += dt * drift + sq * noise_[r];
    }
    ++st.step_index;
    st.t = static_cast<double>(st.step_index) * dt;
    st.rng.set_counter(2 * R * st.step_index);
    check_finite(st, prev_t);
}

void Stepper::check_finite(const TrajectoryState& st, double prev_t) const {
    if (!st.u.all_finite())
        throw TrajectoryAborted("non-finite field at step " + std::to_string(st.step_index) +
                                    " (stream " + std::to_string(st.rng.stream_id()) + ")",
                                prev_t);
}

TrajectoryState strang_step(const TrajectoryState& st, const NoiseSpec& spec, const SimParams& params) {
    Stepper s(spec, params);
    TrajectoryState out = st;
    s.strang_step(out);
    return out;
}

TrajectoryState em_step(const TrajectoryState& st, const NoiseSpec& spec, const SimParams& params) {
    Stepper s(spec, params);
    TrajectoryState out = st;
    s.em_step(out);
    return out;
}

TrajectoryState initial_state(const SpectralField& u0, const SimParams& params) {
    TrajectoryState st;
    st.u = u0;
    st.rng = RngStream(params.seed, params.stream_id);
    return st;
}

TrajectoryState run_trajectory(const SpectralField& u0, const NoiseSpec& spec,
                               const SimParams& params, const TrajectorySink& sink) {
    require_same_grid(u0.grid(), spec.grid(), "run_trajectory");
    if (!u0.all_finite()) throw Error("run_trajectory: initial field is not finite");
    return resume_trajectory(initial_state(u0, params), spec, params, sink);
}

TrajectoryState resume_trajectory(TrajectoryState st, const NoiseSpec& spec, const SimParams& params,
                                  const TrajectorySink& sink, std::uint64_t stop_at_step) {
    Stepper stepper(spec, params);
    const std::uint64_t total = std::min(params.total_steps(), stop_at_step);
    const auto every = static_cast<std::uint64_t>(params.record_every);
    // a resumed state was already recorded before it was checkpointed
    if (sink && st.step_index == 0) sink(st);
    while (st.step_index < total) {
        stepper.step(st);
        if (sink && st.step_index % every == 0) sink(st);
    }
    return st;
}

}  // namespace cascade
