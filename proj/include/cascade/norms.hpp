#pragma once

#include <utility>
#include <vector>

#include "cascade/grid.hpp"
#include "cascade/transform.hpp"

namespace cascade {

/// Homogeneous Sobolev norm (sum_d |d|^{2m} |u_d|^2)^{1/2}; fractional m allowed.
double sobolev_norm(const SpectralField& u, double m);
double sobolev_norm_sq(const SpectralField& u, double m);

/// Lattice maximum of |u(x_j)|. Never exceeds the true sup norm.
double sup_norm(const SpectralField& u, const SineTransform& tr);
double sup_norm(const SpectralField& u);

/// max over |beta| <= m of the lattice sup of |d^beta u|.
double cm_norm(const SpectralField& u, int m, const SineTransform& tr);
double cm_norm(const SpectralField& u, int m);

/// All multi-indices beta in N^n with |beta| <= m, graded order.
std::vector<std::vector<int>> multi_indices_up_to(int dim, int m);

struct Shell {
    int k = 0;
    double energy = 0.0;
};

/// Shell energies E_k = sum_{k <= |d| < k+1} |u_d|^2 for k = 1..ceil(sqrt(n) D).
std::vector<Shell> spectrum_shells(const SpectralField& u);
int shell_count(const GridSpec& grid);

}  // namespace cascade
