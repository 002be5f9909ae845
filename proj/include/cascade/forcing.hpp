#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cascade/grid.hpp"
#include "cascade/rng.hpp"

namespace cascade {

enum class ProfileKind { power, exponential, band, single, zero };

/**
 * Amplitude law for the forcing. Text grammar:
 *   power:p=1.5        b_d = |d|^{-p}
 *   exp:a=0.7          b_d = exp(-a |d|)
 *   band:1,1,0.5       b_d = list[k-1] for floor(|d|) = k (list beyond its end is 0)
 *   single:d=2         b_d = 1 at d = (2,...,2); "single:d=1x3" gives d = (1,3);
 *                      an optional ",b=0.5" sets the amplitude
 *   zero               b_d = 0 (degenerate; only useful as a control)
 */
struct NoiseProfile {
    ProfileKind kind = ProfileKind::band;
    double param = 0.0;
    std::vector<double> band{1.0};
    ModeIndex single_mode;
    double single_amplitude = 1.0;

    static NoiseProfile parse(const std::string& text);
    std::string to_string() const;
};

class NoiseSpec {
  public:
    NoiseSpec() = default;
    NoiseSpec(GridSpec grid, NoiseProfile profile);
    static NoiseSpec parse(const GridSpec& grid, const std::string& text);

    const GridSpec& grid() const { return grid_; }
    const NoiseProfile& profile() const { return profile_; }

    /// b_d in mode-rank order; zero outside the truncation.
    const std::vector<double>& amplitudes() const { return amps_; }
    double amplitude(std::size_t rank) const { return amps_[rank]; }
    /// Ranks with b_d != 0, ascending.
    const std::vector<std::size_t>& active_modes() const { return active_; }

    /// True when some b_d > 0.
    bool nondegenerate() const { return !active_.empty(); }

    /// B_k = sum_d |d|^{2k} b_d^2.
    double bk_sum(double k) const;
    /// B_* = sum_d |b_d|.
    double b_star() const;

  private:
    GridSpec grid_;
    NoiseProfile profile_;
    std::vector<double> amps_;
    std::vector<std::size_t> active_;
};

/// min{m integer : m > n/2}.
int m_star(int dim);

/**
 * Forcing increments b_d (g^R + i g^I) with g ~ N(0, dt), drawn at the
 * stream's next cell. Modes are addressed by lexicographic rank.
 */
SpectralField sample_increments(const NoiseSpec& spec, double dt, RngStream& rng);

/**
 * Brownian increment sum_{c in [first, first+count)} b_d sqrt(cell_dt) g_{c,d}
 * over a run of fine cells. With count = 1 this is sample_increments at that
 * cell; coarser steps reuse the same fine cells, so runs at different dt
 * share one Brownian path.
 */
void path_increment(const NoiseSpec& spec, const RngStream& rng, std::uint64_t first_cell,
                    std::uint64_t count, double cell_dt, SpectralField& out);

/// Stationary E|u_d|^2 = b_d^2 / |d|^2 of the linear (OU) mode equation.
double linear_stationary_mode_energy(const NoiseSpec& spec, std::size_t rank);

/// E||u(t)||_0^2 for the linear equation started from deterministic u0.
double linear_mean_energy(const NoiseSpec& spec, const SpectralField& u0, double nu, double t);

}  // namespace cascade
