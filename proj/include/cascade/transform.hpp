#pragma once

#include <span>
#include <vector>

#include "cascade/grid.hpp"

namespace cascade {

/// phi_d(x) = (2/pi)^{n/2} prod_j sin(d_j x_j); orthonormal in plain L2([0,pi]^n).
double basis_eval(const ModeIndex& d, std::span<const double> x);

/**
 * Separable DST-I between the truncated sine coefficients and the interior
 * collocation lattice. Each axis is a tabulated D x N sine matrix, so a
 * transform costs O(n N^n D) and is exact up to round-off. Tables are built
 * once and never mutated, so one instance may be shared across threads.
 */
class SineTransform {
  public:
    explicit SineTransform(const GridSpec& grid);

    const GridSpec& grid() const { return grid_; }

    void to_physical(const SpectralField& u, PhysicalField& out) const;
    PhysicalField to_physical(const SpectralField& u) const;

    /// Galerkin projection onto the retained modes; content in modes > D is dropped.
    void to_spectral(const PhysicalField& p, SpectralField& out) const;
    SpectralField to_spectral(const PhysicalField& p) const;

    /// Lattice values of the mixed partial derivative d^beta u.
    PhysicalField derivative(const SpectralField& u, std::span<const int> beta) const;

  private:
    void forward(std::span<const Complex> coeffs, std::span<Complex> values,
                 std::span<const std::vector<double>* const> tables) const;

    GridSpec grid_;
    std::vector<double> synth_;    // N x D: sqrt(2/pi) sin(k x_j)
    std::vector<double> cos_;      // N x D: sqrt(2/pi) cos(k x_j)
    std::vector<double> analyze_;  // D x N: weighted transpose of synth_
};

PhysicalField to_physical(const SpectralField& u);
/// Projects p onto {1..D}^n on p's lattice; throws if D > N.
SpectralField to_spectral(const PhysicalField& p, int modes);

/// (pi/(N+1))^n sum_j Re(u(x_j) conj(v(x_j))).
double lattice_inner(const PhysicalField& u, const PhysicalField& v);

}  // namespace cascade
