#include "cascade/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace cascade {

namespace {

constexpr std::size_t kMaxLattice = std::size_t{1} << 26;

std::size_t checked_pow(int base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) {
        r *= static_cast<std::size_t>(base);
        if (r > kMaxLattice) throw Error("grid too large: " + std::to_string(base) + "^" +
                                         std::to_string(exp) + " exceeds lattice limit");
    }
    return r;
}

}  // namespace

GridSpec::GridSpec(int dim, int points, int modes) : dim_(dim), points_(points), modes_(modes) {
    if (dim < 1) throw Error("grid: dimension n must be >= 1");
    if (points < 4) throw Error("grid: N must be >= 4");
    if (modes < 1 || modes > points) throw Error("grid: D must satisfy 1 <= D <= N");
    mode_count_ = checked_pow(modes, dim);
    lattice_size_ = checked_pow(points, dim);
    norm_sq_.assign(mode_count_, 0.0);
    for (std::size_t r = 0; r < mode_count_; ++r) {
        std::size_t rest = r;
        double s = 0.0;
        for (int a = 0; a < dim_; ++a) {
            const int d = static_cast<int>(rest % static_cast<std::size_t>(modes_)) + 1;
            rest /= static_cast<std::size_t>(modes_);
            s += static_cast<double>(d) * d;
        }
        norm_sq_[r] = s;
    }
}

double GridSpec::lattice_point(int j) const {
    return j * std::numbers::pi / (points_ + 1);
}

double GridSpec::quadrature_weight() const {
    return std::pow(std::numbers::pi / (points_ + 1), dim_);
}

ModeIndex GridSpec::mode_of(std::size_t rank) const {
    ModeIndex d(static_cast<std::size_t>(dim_));
    for (int a = dim_ - 1; a >= 0; --a) {
        d[static_cast<std::size_t>(a)] = static_cast<int>(rank % static_cast<std::size_t>(modes_)) + 1;
        rank /= static_cast<std::size_t>(modes_);
    }
    return d;
}

std::size_t GridSpec::rank_of(const ModeIndex& d) const {
    if (d.size() != static_cast<std::size_t>(dim_)) throw Error("mode index has wrong dimension");
    std::size_t r = 0;
    for (int dj : d) {
        if (dj < 1 || dj > modes_) throw Error("mode index outside {1..D}^n");
        r = r * static_cast<std::size_t>(modes_) + static_cast<std::size_t>(dj - 1);
    }
    return r;
}

std::string GridSpec::describe() const {
    std::ostringstream os;
    os << "n=" << dim_ << " N=" << points_ << " D=" << modes_;
    return os.str();
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where) {
    if (!(a == b))
        throw GridMismatch(std::string(where) + ": grid mismatch (" + a.describe() + " vs " +
                           b.describe() + ")");
}

SpectralField::SpectralField(GridSpec grid)
    : grid_(std::move(grid)), coeffs_(grid_.mode_count(), Complex{}) {}

SpectralField::SpectralField(GridSpec grid, std::vector<Complex> coeffs)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_.mode_count())
        throw Error("spectral field: coefficient count does not match D^n");
}

SpectralField SpectralField::single_mode(const GridSpec& grid, const ModeIndex& d, Complex value) {
    SpectralField u(grid);
    u.at(d) = value;
    return u;
}

bool SpectralField::all_finite() const {
    for (const Complex& c : coeffs_)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

SpectralField& SpectralField::operator*=(Complex c) {
    for (Complex& v : coeffs_) v *= c;
    return *this;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    require_same_grid(grid_, other.grid_, "spectral add");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
}

SpectralField operator*(Complex c, SpectralField u) {
    u *= c;
    return u;
}

SpectralField operator+(SpectralField a, const SpectralField& b) {
    a += b;
    return a;
}

PhysicalField::PhysicalField(GridSpec grid)
    : grid_(std::move(grid)), values_(grid_.lattice_size(), Complex{}) {}

PhysicalField::PhysicalField(GridSpec grid, std::vector<Complex> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.lattice_size())
        throw Error("physical field: value count does not match N^n");
}

bool PhysicalField::all_finite() const {
    for (const Complex& c : values_)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

}  // namespace cascade
