#include "cascade/transform.hpp"

#include <cmath>
#include <numbers>

namespace cascade {

namespace {

// Contracts one axis of a row-major tensor against a dense (out_len x shape[axis]) matrix.
void contract_axis(std::span<const Complex> in, std::span<Complex> out,
                   std::span<const std::size_t> shape, std::size_t axis, const double* mat,
                   std::size_t out_len) {
    std::size_t outer = 1;
    std::size_t inner = 1;
    for (std::size_t a = 0; a < axis; ++a) outer *= shape[a];
    for (std::size_t a = axis + 1; a < shape.size(); ++a) inner *= shape[a];
    const std::size_t in_len = shape[axis];

    if (inner == 1) {
        for (std::size_t o = 0; o < outer; ++o) {
            const Complex* src = in.data() + o * in_len;
            Complex* dst = out.data() + o * out_len;
            for (std::size_t k = 0; k < out_len; ++k) {
                const double* row = mat + k * in_len;
                double re = 0.0;
                double im = 0.0;
                for (std::size_t j = 0; j < in_len; ++j) {
                    re += row[j] * src[j].real();
                    im += row[j] * src[j].imag();
                }
                dst[k] = {re, im};
            }
        }
        return;
    }

    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t k = 0; k < out_len; ++k) {
            const double* row = mat + k * in_len;
            Complex* dst = out.data() + (o * out_len + k) * inner;
            for (std::size_t i = 0; i < inner; ++i) dst[i] = Complex{};
            for (std::size_t j = 0; j < in_len; ++j) {
                const double w = row[j];
                const Complex* src = in.data() + (o * in_len + j) * inner;
                for (std::size_t i = 0; i < inner; ++i) dst[i] += w * src[i];
            }
        }
    }
}

void separable_apply(std::span<const Complex> in, std::span<Complex> out, std::size_t dim,
                     std::size_t in_len, std::size_t out_len,
                     std::span<const double* const> mats) {
    if (dim == 1) {
        const std::size_t shape[1] = {in_len};
        contract_axis(in, out, shape, 0, mats[0], out_len);
        return;
    }
    std::vector<std::size_t> shape(dim, in_len);
    std::vector<Complex> a(in.begin(), in.end());
    std::vector<Complex> b;
    for (std::size_t axis = 0; axis < dim; ++axis) {
        std::size_t total = 1;
        for (std::size_t s = 0; s < dim; ++s) total *= (s == axis ? out_len : shape[s]);
        b.assign(total, Complex{});
        contract_axis(a, b, shape, axis, mats[axis], out_len);
        shape[axis] = out_len;
        a.swap(b);
    }
    std::copy(a.begin(), a.end(), out.begin());
}

}  // namespace

double basis_eval(const ModeIndex& d, std::span<const double> x) {
    if (d.size() != x.size()) throw Error("basis_eval: mode and point dimensions differ");
    double v = std::pow(2.0 / std::numbers::pi, 0.5 * static_cast<double>(d.size()));
    for (std::size_t j = 0; j < d.size(); ++j) v *= std::sin(d[j] * x[j]);
    return v;
}

SineTransform::SineTransform(const GridSpec& grid) : grid_(grid) {
    const auto N = static_cast<std::size_t>(grid.points());
    const auto D = static_cast<std::size_t>(grid.modes());
    const double norm = std::sqrt(2.0 / std::numbers::pi);
    const double weight = std::numbers::pi / static_cast<double>(N + 1);
    synth_.resize(N * D);
    cos_.resize(N * D);
    analyze_.resize(D * N);
    for (std::size_t j = 0; j < N; ++j) {
        const double x = grid.lattice_point(static_cast<int>(j + 1));
        for (std::size_t k = 0; k < D; ++k) {
            const double arg = static_cast<double>(k + 1) * x;
            synth_[j * D + k] = norm * std::sin(arg);
            cos_[j * D + k] = norm * std::cos(arg);
            analyze_[k * N + j] = weight * synth_[j * D + k];
        }
    }
}

void SineTransform::to_physical(const SpectralField& u, PhysicalField& out) const {
    require_same_grid(u.grid(), grid_, "to_physical");
    if (!(out.grid() == grid_)) out = PhysicalField(grid_);
    std::vector<const double*> mats(static_cast<std::size_t>(grid_.dim()), synth_.data());
    separable_apply(u.coeffs(), out.values(), mats.size(), static_cast<std::size_t>(grid_.modes()),
                    static_cast<std::size_t>(grid_.points()), mats);
}

PhysicalField SineTransform::to_physical(const SpectralField& u) const {
    PhysicalField p(grid_);
    to_physical(u, p);
    return p;
}

void SineTransform::to_spectral(const PhysicalField& p, SpectralField& out) const {
    if (p.grid().dim() != grid_.dim() || p.grid().points() != grid_.points())
        throw GridMismatch("to_spectral: lattice mismatch (" + p.grid().describe() + " vs " +
                           grid_.describe() + ")");
    if (!(out.grid() == grid_)) out = SpectralField(grid_);
    std::vector<const double*> mats(static_cast<std::size_t>(grid_.dim()), analyze_.data());
    separable_apply(p.values(), out.coeffs(), mats.size(), static_cast<std::size_t>(grid_.points()),
                    static_cast<std::size_t>(grid_.modes()), mats);
}

SpectralField SineTransform::to_spectral(const PhysicalField& p) const {
    SpectralField u(grid_);
    to_spectral(p, u);
    return u;
}

PhysicalField SineTransform::derivative(const SpectralField& u, std::span<const int> beta) const {
    require_same_grid(u.grid(), grid_, "derivative");
    if (beta.size() != static_cast<std::size_t>(grid_.dim()))
        throw Error("derivative: multi-index has wrong dimension");
    const auto N = static_cast<std::size_t>(grid_.points());
    const auto D = static_cast<std::size_t>(grid_.modes());
    // d^b/dx^b sin(kx) = k^b * {sin, cos, -sin, -cos}[b mod 4](kx)
    std::vector<std::vector<double>> tables(beta.size());
    std::vector<const double*> mats(beta.size());
    for (std::size_t a = 0; a < beta.size(); ++a) {
        const int b = beta[a];
        if (b < 0) throw Error("derivative: negative order");
        const std::vector<double>& base = (b % 2 == 0) ? synth_ : cos_;
        const double sign = (b % 4 >= 2) ? -1.0 : 1.0;
        tables[a].resize(N * D);
        for (std::size_t j = 0; j < N; ++j)
            for (std::size_t k = 0; k < D; ++k)
                tables[a][j * D + k] = sign * std::pow(static_cast<double>(k + 1), b) * base[j * D + k];
        mats[a] = tables[a].data();
    }
    PhysicalField out(grid_);
    separable_apply(u.coeffs(), out.values(), beta.size(), D, N, mats);
    return out;
}

PhysicalField to_physical(const SpectralField& u) {
    return SineTransform(u.grid()).to_physical(u);
}

SpectralField to_spectral(const PhysicalField& p, int modes) {
    const GridSpec& g = p.grid();
    if (modes < 1 || modes > g.points())
        throw Error("to_spectral: requested D=" + std::to_string(modes) +
                    " incompatible with lattice N=" + std::to_string(g.points()));
    return SineTransform(GridSpec(g.dim(), g.points(), modes)).to_spectral(p);
}

double lattice_inner(const PhysicalField& u, const PhysicalField& v) {
    if (u.values().size() != v.values().size()) throw GridMismatch("lattice_inner: size mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < u.values().size(); ++j)
        s += (u[j] * std::conj(v[j])).real();
    return s * u.grid().quadrature_weight();
}

}  // namespace cascade
