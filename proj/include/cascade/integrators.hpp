#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cascade/forcing.hpp"
#include "cascade/grid.hpp"
#include "cascade/transform.hpp"

namespace cascade {

enum class Scheme { strang, em };

Scheme parse_scheme(const std::string& s);
const char* to_string(Scheme s);

/**
 * One trajectory's contract, in fast time t (slow time is tau = nu t).
 *
 * Brownian addressing: the path is built from fine cells of length
 * dt / (2 * path_refinement). Strang step s uses cells
 * [R(2s), R(2s+1)) for its first OU half and [R(2s+1), R(2s+2)) for the
 * second; an EM step s uses [2Rs, 2R(s+1)). Two runs whose dt differ by a
 * power of two and whose refinements compensate therefore see the same path.
 */
struct SimParams {
    double nu = 0.1;
    double dt = 0.01;
    double T = 1.0;
    Scheme scheme = Scheme::strang;
    int record_every = 10;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    bool nonlinear = true;
    std::uint64_t path_refinement = 1;

    void validate() const;
    std::uint64_t total_steps() const;
    double slow_time(double t) const { return nu * t; }
    double fast_time(double tau) const { return tau / nu; }
};

/// Fast-time step defaults: 0.01 for Strang, 0.5 * min(0.01, 0.5 / (nu D^2)) for EM.
double default_dt(Scheme scheme, double nu, const GridSpec& grid);

struct TrajectoryState {
    std::uint64_t step_index = 0;
    double t = 0.0;
    SpectralField u;
    RngStream rng;
};

/// Raised when a trajectory produces a non-finite field.
class TrajectoryAborted : public Error {
  public:
    TrajectoryAborted(const std::string& msg, double last_good_time)
        : Error(msg), last_good_time_(last_good_time) {}
    double last_good_time() const { return last_good_time_; }

  private:
    double last_good_time_;
};

/**
 * Exact OU update u_d <- e^{-nu|d|^2 h} u_d + sqrt(nu) gamma_d for the linear
 * mode equation du_d = -nu |d|^2 u_d dt + sqrt(nu) b_d dbeta_d.
 * `increment` holds b_d * (Brownian increment over h); it is rescaled so that
 * gamma_d has per-component variance b_d^2 (1 - e^{-2 nu |d|^2 h}) / (2 nu |d|^2).
 */
void ou_exact_step(SpectralField& u, const NoiseSpec& spec, double nu, double h,
                   const SpectralField& increment);
/// Same, drawing the increment from the stream's next cell.
SpectralField ou_exact_step(const SpectralField& u, const NoiseSpec& spec, double nu, double h,
                            RngStream& rng);

/// z <- z exp(-i |z|^2 h) at every lattice point.
void phase_rotate_lattice(PhysicalField& p, double h);
/// Exact flow of u_t = -i|u|^2 u on the lattice followed by Galerkin truncation.
SpectralField phase_rotation_step(const SpectralField& u, double h, const SineTransform& tr);
SpectralField phase_rotation_step(const SpectralField& u, double h);

/// Lattice-evaluate-then-truncate cubic term Pi(|u|^2 u).
SpectralField cubic_term(const SpectralField& u, const SineTransform& tr);

/**
 * Holds the transform tables and per-step workspace for one trajectory.
 * Not shareable between threads; create one per trajectory.
 */
class Stepper {
  public:
    Stepper(const NoiseSpec& spec, const SimParams& params);

    void step(TrajectoryState& st);
    void strang_step(TrajectoryState& st);
    void em_step(TrajectoryState& st);

    /// nu |d_max|^2 dt >= 1 for EM.
    bool em_stability_violated() const { return em_unstable_; }
    const SineTransform& transform() const { return tr_; }

  private:
    void check_finite(const TrajectoryState& st, double prev_t) const;

    const NoiseSpec& spec_;
    SimParams params_;
    SineTransform tr_;
    std::vector<double> half_decay_;
    // OU kernel weight of each fine path cell within a half step, per active mode
    std::vector<double> cell_weight_;
    SpectralField noise_;
    SpectralField scratch_;
    PhysicalField lattice_;
    bool em_unstable_ = false;
};

TrajectoryState strang_step(const TrajectoryState& st, const NoiseSpec& spec, const SimParams& params);
TrajectoryState em_step(const TrajectoryState& st, const NoiseSpec& spec, const SimParams& params);

using TrajectorySink = std::function<void(const TrajectoryState&)>;

TrajectoryState initial_state(const SpectralField& u0, const SimParams& params);

/**
 * Advances to step ceil(T/dt), calling `sink` at step 0 and at every
 * multiple of record_every. Throws TrajectoryAborted on a non-finite field.
 */
TrajectoryState run_trajectory(const SpectralField& u0, const NoiseSpec& spec,
                               const SimParams& params, const TrajectorySink& sink = {});
/// Continues `state` (e.g. from a checkpoint) to the end of the horizon.
TrajectoryState resume_trajectory(TrajectoryState state, const NoiseSpec& spec,
                                  const SimParams& params, const TrajectorySink& sink = {},
                                  std::uint64_t stop_at_step = UINT64_MAX);

// Checkpoints: magic "CSLCHKPT", u32 version, u32 zero, then step_index, dt,
// t, base_seed, stream_id, rng counter (u64/f64 LE) and a complex128 snapshot.
std::vector<std::uint8_t> encode_checkpoint(const TrajectoryState& st, double dt);
TrajectoryState decode_checkpoint(std::span<const std::uint8_t> bytes, double expected_dt);

// Initial data.
SpectralField zero_field(const GridSpec& grid);
SpectralField single_mode_field(const GridSpec& grid, const ModeIndex& d, Complex c);
/// u_d = |d|^{-q} (g^R + i g^I) / sqrt(2), g from a dedicated cell of `rng`.
SpectralField smooth_random_field(const GridSpec& grid, double q, const RngStream& rng);

struct InitialConstraint {
    double sup_bound = 1.0;  // |u0|_inf <= K
    double kappa = 0.02;     // ||u0||_m <= nu^{-kappa m}
    double m = 2.0;
};

/// Largest rescaling c*u0 with |c u0|_inf <= K and ||c u0||_m <= nu^{-kappa m}.
SpectralField constrain_initial(const SpectralField& u0, double nu, const InitialConstraint& c);
/// Fixed real profile u_d = prod_j d_j^{-3}, rescaled by constrain_initial.
SpectralField policy_initial(const GridSpec& grid, double nu, const InitialConstraint& c);

}  // namespace cascade
