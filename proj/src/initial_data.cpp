#include <cmath>

#include "cascade/integrators.hpp"
#include "cascade/norms.hpp"

namespace cascade {

namespace {

// Reserved cell for initial-data draws, far beyond any step's cells.
constexpr std::uint64_t kInitialCell = ~std::uint64_t{0};

// Oversampled lattice sup, a tighter proxy for the true sup than the run lattice.
double fine_sup(const SpectralField& u) {
    const GridSpec& g = u.grid();
    const GridSpec fine(g.dim(), 4 * g.points() + 3, g.modes());
    const SpectralField lifted(fine, std::vector<Complex>(u.coeffs().begin(), u.coeffs().end()));
    return sup_norm(lifted);
}

}  // namespace

SpectralField zero_field(const GridSpec& grid) { return SpectralField::zero(grid); }

SpectralField single_mode_field(const GridSpec& grid, const ModeIndex& d, Complex c) {
    return SpectralField::single_mode(grid, d, c);
}

SpectralField smooth_random_field(const GridSpec& grid, double q, const RngStream& rng) {
    SpectralField u(grid);
    const auto& w = grid.mode_norm_sq();
    for (std::size_t r = 0; r < w.size(); ++r) {
        const auto [gr, gi] = rng.gaussian_pair(kInitialCell, r);
        u[r] = std::pow(w[r], -0.5 * q) * Complex{gr, gi} / std::sqrt(2.0);
    }
    return u;
}

SpectralField constrain_initial(const SpectralField& u0, double nu, const InitialConstraint& c) {
    const double sup = fine_sup(u0);
    const double hm = sobolev_norm(u0, c.m);
    if (sup == 0.0 || hm == 0.0) return u0;
    const double scale = std::min(c.sup_bound / sup, std::pow(nu, -c.kappa * c.m) / hm);
    return Complex{scale, 0.0} * u0;
}

SpectralField policy_initial(const GridSpec& grid, double nu, const InitialConstraint& c) {
    SpectralField u(grid);
    for (std::size_t r = 0; r < grid.mode_count(); ++r) {
        double v = 1.0;
        for (int dj : grid.mode_of(r)) v /= static_cast<double>(dj) * dj * dj;
        u[r] = v;
    }
    return constrain_initial(u, nu, c);
}

}  // namespace cascade
