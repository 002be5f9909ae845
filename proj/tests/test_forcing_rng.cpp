#include <doctest.h>

#include <cmath>
#include <set>

#include "cascade/forcing.hpp"

using namespace cascade;

TEST_CASE("Philox4x32-10 known-answer vectors") {
    using W = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == W{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(philox4x32({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}) == W{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          W{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("normal quantile inverts the normal CDF") {
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
    for (double p = 1e-12; p < 1.0; p = p < 0.01 ? p * 10 : p + 0.01) {
        const double x = normal_quantile(p);
        CHECK(0.5 * std::erfc(-x / std::sqrt(2.0)) == doctest::Approx(p).epsilon(1e-12));
        // 1 - p is inexact in the far tail
        if (p >= 1e-6) CHECK(normal_quantile(1.0 - p) == doctest::Approx(-x).epsilon(1e-9));
    }
    CHECK_THROWS_AS(normal_quantile(0.0), Error);
    CHECK_THROWS_AS(normal_quantile(1.0), Error);
}

TEST_CASE("RNG streams are addressable and distinct") {
    const RngStream a(5, 0), b(5, 1), c(6, 0);
    CHECK(a.gaussian_pair(3, 7) == RngStream(5, 0).gaussian_pair(3, 7));
    CHECK(a.gaussian_pair(3, 7) != b.gaussian_pair(3, 7));
    CHECK(a.gaussian_pair(3, 7) != c.gaussian_pair(3, 7));
    CHECK(a.gaussian_pair(3, 7) != a.gaussian_pair(4, 7));
    CHECK(a.gaussian_pair(3, 7) != a.gaussian_pair(3, 8));
    CHECK_THROWS_AS(RngStream(1, std::uint64_t{1} << 32), Error);
    RngStream s(1, 2);
    CHECK(s.take_cell() == 0);
    CHECK(s.take_cell() == 1);
    CHECK(s.counter() == 2);
}

TEST_CASE("Gaussian draws have unit variance and are uncorrelated") {
    const RngStream s(11, 3);
    const int n = 200000;
    double m1 = 0, m2 = 0, cross = 0, m4 = 0;
    for (int i = 0; i < n; ++i) {
        const auto [a, b] = s.gaussian_pair(static_cast<std::uint64_t>(i), 0);
        m1 += a;
        m2 += a * a;
        m4 += a * a * a * a;
        cross += a * b;
    }
    CHECK(std::abs(m1 / n) < 4.0 / std::sqrt(n));
    CHECK(std::abs(m2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(cross / n) < 4.0 / std::sqrt(n));
    CHECK(std::abs(m4 / n - 3.0) < 4.0 * std::sqrt(96.0 / n));
}

TEST_CASE("profile grammar") {
    CHECK(NoiseProfile::parse("power:p=1.5").kind == ProfileKind::power);
    CHECK(NoiseProfile::parse("power:p=1.5").param == 1.5);
    CHECK(NoiseProfile::parse("exp:a=0.7").kind == ProfileKind::exponential);
    CHECK(NoiseProfile::parse("band:1,1,0.5").band == std::vector<double>{1, 1, 0.5});
    CHECK(NoiseProfile::parse("single:d=2").kind == ProfileKind::single);
    CHECK(NoiseProfile::parse("single:d=1x3").single_mode == ModeIndex{1, 3});
    CHECK(NoiseProfile::parse("single:d=2,b=0.5").single_amplitude == 0.5);
    CHECK(NoiseProfile::parse("zero").kind == ProfileKind::zero);
    for (const char* bad : {"", "power", "power:q=1", "band:", "band:1,x", "exp:a=-1", "single:d=0", "nope:1"})
        CHECK_THROWS_AS(NoiseProfile::parse(bad), Error);
    for (const char* text : {"power:p=1.5", "exp:a=0.7", "band:1,1,0.5", "single:d=1x3,b=0.5", "zero"})
        CHECK(NoiseProfile::parse(NoiseProfile::parse(text).to_string()).to_string() ==
              NoiseProfile::parse(text).to_string());
}

TEST_CASE("amplitudes and B_k sums") {
    CHECK(NoiseSpec::parse(GridSpec(1, 8, 4), "single:d=1").bk_sum(2.0) == 1.0);
    const NoiseSpec band = NoiseSpec::parse(GridSpec(1, 64, 32), "band:1,1,1");
    CHECK(band.bk_sum(0.0) == 3.0);
    CHECK(band.bk_sum(1.0) == 14.0);
    CHECK(band.bk_sum(-1.0) == doctest::Approx(1.0 + 0.25 + 1.0 / 9));
    CHECK(band.active_modes().size() == 3);
    CHECK(band.nondegenerate());
    CHECK(NoiseSpec::parse(GridSpec(1, 8, 2), "power:p=1").bk_sum(1.0) == doctest::Approx(2.0));
    const NoiseSpec e = NoiseSpec::parse(GridSpec(1, 8, 3), "exp:a=0.5");
    CHECK(e.amplitude(2) == doctest::Approx(std::exp(-1.5)));
    CHECK(e.b_star() == doctest::Approx(std::exp(-0.5) + std::exp(-1.0) + std::exp(-1.5)));
    // two-dimensional band: floor(|(1,2)|) = 2
    const NoiseSpec b2 = NoiseSpec::parse(GridSpec(2, 8, 3), "band:1,0.5");
    CHECK(b2.amplitude(b2.grid().rank_of({1, 1})) == 1.0);
    CHECK(b2.amplitude(b2.grid().rank_of({1, 2})) == 0.5);
    CHECK(b2.amplitude(b2.grid().rank_of({2, 2})) == 0.5);
    CHECK(b2.amplitude(b2.grid().rank_of({3, 3})) == 0.0);
    CHECK_FALSE(NoiseSpec::parse(GridSpec(1, 8, 2), "single:d=3").nondegenerate());
    CHECK(m_star(1) == 1);
    CHECK(m_star(2) == 2);
    CHECK(m_star(3) == 2);
}

TEST_CASE("zero spec draws zeros and is flagged") {
    const NoiseSpec z = NoiseSpec::parse(GridSpec(1, 8, 4), "zero");
    CHECK_FALSE(z.nondegenerate());
    RngStream rng(1, 0);
    const SpectralField w = sample_increments(z, 0.5, rng);
    for (const Complex& c : w.coeffs()) CHECK(c == Complex(0.0));
}

TEST_CASE("increment variance scales with dt") {
    const NoiseSpec spec = NoiseSpec::parse(GridSpec(1, 4, 1), "band:1");
    RngStream rng(77, 0);
    const int n = 100000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double re = sample_increments(spec, 0.25, rng)[0].real();
        s += re;
        s2 += re * re;
    }
    const double var = s2 / n - (s / n) * (s / n);
    CHECK(std::abs(var - 0.25) <= 3.0 * 0.25 * std::sqrt(2.0 / n));
    CHECK_THROWS_AS(sample_increments(spec, 0.0, rng), Error);
}

TEST_CASE("increments replay and add up over cells") {
    const NoiseSpec spec = NoiseSpec::parse(GridSpec(1, 16, 8), "power:p=1");
    RngStream a(3, 1), b(3, 1);
    CHECK(sample_increments(spec, 0.1, a) == sample_increments(spec, 0.1, b));
    SpectralField whole(spec.grid()), p1(spec.grid()), p2(spec.grid());
    path_increment(spec, a, 10, 2, 0.05, whole);
    path_increment(spec, a, 10, 1, 0.05, p1);
    path_increment(spec, a, 11, 1, 0.05, p2);
    p1 += p2;
    for (std::size_t r = 0; r < 8; ++r) CHECK(std::abs(whole[r] - p1[r]) < 1e-15);
}

TEST_CASE("linear OU closed forms") {
    const NoiseSpec spec = NoiseSpec::parse(GridSpec(1, 16, 8), "band:1,1,1");
    CHECK(linear_stationary_mode_energy(spec, 1) == doctest::Approx(0.25));
    CHECK(linear_stationary_mode_energy(spec, 5) == 0.0);
    const SpectralField u0 = SpectralField::single_mode(spec.grid(), {1});
    // E||u(t)||_0^2 = e^{-2 nu t} + sum_d (b_d^2/|d|^2)(1 - e^{-2 nu |d|^2 t})
    const double nu = 0.3, t = 2.0;
    double oracle = std::exp(-2 * nu * t);
    for (int d = 1; d <= 3; ++d) oracle += (1.0 / (d * d)) * (1 - std::exp(-2 * nu * d * d * t));
    CHECK(linear_mean_energy(spec, u0, nu, t) == doctest::Approx(oracle).epsilon(1e-13));
}
