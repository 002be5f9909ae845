#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cascade {

using Complex = std::complex<double>;

class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class GridMismatch : public Error {
  public:
    explicit GridMismatch(const std::string& msg) : Error(msg) {}
};

/// Multi-index d = (d_1, ..., d_n) with every d_j >= 1.
using ModeIndex = std::vector<int>;

/**
 * Cube [0, pi]^n sampled at x_j = j*pi/(N+1), j = 1..N per axis, together
 * with the spectral truncation {1..D}^n of the odd sine basis.
 *
 * Spectral arrays are stored row-major over d (d_1 slowest), which is also
 * the lexicographic mode rank used by the forcing draws. Lattice arrays use
 * the same layout over j.
 */
class GridSpec {
  public:
    GridSpec() = default;
    GridSpec(int dim, int points, int modes);

    int dim() const { return dim_; }
    int points() const { return points_; }
    int modes() const { return modes_; }

    std::size_t mode_count() const { return mode_count_; }
    std::size_t lattice_size() const { return lattice_size_; }

    /// N >= 2D; with this the cubic term is computed without aliasing.
    bool anti_aliased() const { return points_ >= 2 * modes_; }

    /// x_j for j = 1..N.
    double lattice_point(int j) const;
    /// (pi / (N+1))^n, the lattice quadrature weight.
    double quadrature_weight() const;

    ModeIndex mode_of(std::size_t rank) const;
    std::size_t rank_of(const ModeIndex& d) const;

    /// |d|^2 for every retained mode, in rank order.
    const std::vector<double>& mode_norm_sq() const { return norm_sq_; }

    friend bool operator==(const GridSpec& a, const GridSpec& b) {
        return a.dim_ == b.dim_ && a.points_ == b.points_ && a.modes_ == b.modes_;
    }

    std::string describe() const;

  private:
    int dim_ = 1;
    int points_ = 4;
    int modes_ = 1;
    std::size_t mode_count_ = 1;
    std::size_t lattice_size_ = 4;
    std::vector<double> norm_sq_{1.0};
};

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where);

/// Coefficients u_d of u(x) = sum_d u_d phi_d(x) over the truncated index set.
class SpectralField {
  public:
    SpectralField() = default;
    explicit SpectralField(GridSpec grid);
    SpectralField(GridSpec grid, std::vector<Complex> coeffs);

    static SpectralField zero(const GridSpec& grid) { return SpectralField(grid); }
    static SpectralField single_mode(const GridSpec& grid, const ModeIndex& d,
                                     Complex value = 1.0);

    const GridSpec& grid() const { return grid_; }
    std::span<const Complex> coeffs() const { return coeffs_; }
    std::span<Complex> coeffs() { return coeffs_; }

    Complex& operator[](std::size_t rank) { return coeffs_[rank]; }
    const Complex& operator[](std::size_t rank) const { return coeffs_[rank]; }
    Complex& at(const ModeIndex& d) { return coeffs_[grid_.rank_of(d)]; }
    const Complex& at(const ModeIndex& d) const { return coeffs_[grid_.rank_of(d)]; }

    bool all_finite() const;

    SpectralField& operator*=(Complex c);
    SpectralField& operator+=(const SpectralField& other);

    friend bool operator==(const SpectralField& a, const SpectralField& b) {
        return a.grid_ == b.grid_ && a.coeffs_ == b.coeffs_;
    }

  private:
    GridSpec grid_;
    std::vector<Complex> coeffs_;
};

SpectralField operator*(Complex c, SpectralField u);
SpectralField operator+(SpectralField a, const SpectralField& b);

/// Values of a field on the N^n collocation lattice.
class PhysicalField {
  public:
    PhysicalField() = default;
    explicit PhysicalField(GridSpec grid);
    PhysicalField(GridSpec grid, std::vector<Complex> values);

    const GridSpec& grid() const { return grid_; }
    std::span<const Complex> values() const { return values_; }
    std::span<Complex> values() { return values_; }
    Complex& operator[](std::size_t j) { return values_[j]; }
    const Complex& operator[](std::size_t j) const { return values_[j]; }

    bool all_finite() const;

  private:
    GridSpec grid_;
    std::vector<Complex> values_;
};

}  // namespace cascade
