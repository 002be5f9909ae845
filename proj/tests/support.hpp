#pragma once

#include <cmath>
#include <random>

#include "cascade/grid.hpp"
#include "cascade/transform.hpp"

namespace testsupport {

using namespace cascade;

/// Seeded generator for property tests.
struct Gen {
    std::mt19937_64 eng;
    explicit Gen(std::uint64_t seed) : eng(seed) {}

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
    double normal() { return std::normal_distribution<double>()(eng); }

    GridSpec grid() {
        const int n = integer(1, 3);
        const int N = n == 1 ? integer(4, 64) : n == 2 ? integer(4, 24) : integer(4, 10);
        return GridSpec(n, N, integer(1, N));
    }

    /// Gaussian coefficients with |d|^{-slope} envelope.
    SpectralField field(const GridSpec& g, double slope = 0.0) {
        SpectralField u(g);
        for (std::size_t r = 0; r < g.mode_count(); ++r)
            u[r] = std::pow(g.mode_norm_sq()[r], -0.5 * slope) * Complex(normal(), normal());
        return u;
    }
    SpectralField field(const GridSpec& g, bool random_slope) {
        return field(g, random_slope ? uniform(0.0, 3.0) : 0.0);
    }
};

/// O(N^{2n}) evaluation of sum_d u_d phi_d on the lattice, straight from the basis.
inline PhysicalField direct_physical(const SpectralField& u) {
    const GridSpec& g = u.grid();
    PhysicalField p(g);
    std::vector<double> x(static_cast<std::size_t>(g.dim()));
    for (std::size_t j = 0; j < g.lattice_size(); ++j) {
        std::size_t rem = j;
        for (int a = g.dim() - 1; a >= 0; --a) {
            x[static_cast<std::size_t>(a)] = g.lattice_point(static_cast<int>(rem % static_cast<std::size_t>(g.points())) + 1);
            rem /= static_cast<std::size_t>(g.points());
        }
        Complex acc = 0.0;
        for (std::size_t r = 0; r < g.mode_count(); ++r) acc += u[r] * basis_eval(g.mode_of(r), x);
        p[j] = acc;
    }
    return p;
}

inline double max_diff(std::span<const Complex> a, std::span<const Complex> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace testsupport
