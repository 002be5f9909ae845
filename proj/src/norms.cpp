#include "cascade/norms.hpp"

#include <algorithm>
#include <cmath>

namespace cascade {

namespace {

long isqrt(long v) {
    auto r = static_cast<long>(std::sqrt(static_cast<double>(v)));
    while (r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r;
}

double lattice_max_abs(const PhysicalField& p) {
    double best = 0.0;
    for (const Complex& z : p.values()) best = std::max(best, std::abs(z));
    return best;
}

}  // namespace

double sobolev_norm_sq(const SpectralField& u, double m) {
    if (m < 0.0) throw Error("sobolev_norm: order must be >= 0");
    const auto& w = u.grid().mode_norm_sq();
    const auto c = u.coeffs();
    double s = 0.0;
    if (m == 0.0) {
        for (const Complex& z : c) s += std::norm(z);
    } else {
        for (std::size_t r = 0; r < c.size(); ++r) s += std::pow(w[r], m) * std::norm(c[r]);
    }
    return s;
}

double sobolev_norm(const SpectralField& u, double m) { return std::sqrt(sobolev_norm_sq(u, m)); }

double sup_norm(const SpectralField& u, const SineTransform& tr) {
    return lattice_max_abs(tr.to_physical(u));
}

double sup_norm(const SpectralField& u) { return sup_norm(u, SineTransform(u.grid())); }

std::vector<std::vector<int>> multi_indices_up_to(int dim, int m) {
    std::vector<std::vector<int>> out;
    for (int total = 0; total <= m; ++total) {
        std::vector<int> beta(static_cast<std::size_t>(dim), 0);
        // enumerate compositions of `total` into `dim` nonnegative parts
        auto rec = [&](auto&& self, std::size_t axis, int left) -> void {
            if (axis + 1 == beta.size()) {
                beta[axis] = left;
                out.push_back(beta);
                return;
            }
            for (int b = left; b >= 0; --b) {
                beta[axis] = b;
                self(self, axis + 1, left - b);
            }
        };
        rec(rec, 0, total);
    }
    return out;
}

double cm_norm(const SpectralField& u, int m, const SineTransform& tr) {
    if (m < 0) throw Error("cm_norm: order must be >= 0");
    double best = 0.0;
    for (const auto& beta : multi_indices_up_to(u.grid().dim(), m))
        best = std::max(best, lattice_max_abs(tr.derivative(u, beta)));
    return best;
}

double cm_norm(const SpectralField& u, int m) { return cm_norm(u, m, SineTransform(u.grid())); }

int shell_count(const GridSpec& grid) {
    return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(grid.dim())) * grid.modes() - 1e-12));
}

std::vector<Shell> spectrum_shells(const SpectralField& u) {
    const int K = shell_count(u.grid());
    std::vector<Shell> shells(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) shells[static_cast<std::size_t>(k)].k = k + 1;
    const auto& w = u.grid().mode_norm_sq();
    const auto c = u.coeffs();
    for (std::size_t r = 0; r < c.size(); ++r) {
        const long k = isqrt(std::lround(w[r]));
        shells[static_cast<std::size_t>(std::min<long>(k, K) - 1)].energy += std::norm(c[r]);
    }
    return shells;
}

}  // namespace cascade
