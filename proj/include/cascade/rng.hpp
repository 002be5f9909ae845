#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace cascade {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Inverse of the standard normal CDF (Wichura, AS241), |rel err| ~ 1e-16.
double normal_quantile(double p);

/// Maps 64 random bits to the open interval (0, 1).
inline double open_uniform(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/**
 * Counter-based Gaussian source for one trajectory. A draw is addressed by
 * (base_seed, stream_id, cell, mode_rank) and never depends on what was drawn
 * before, so any step of any trajectory can be replayed in isolation.
 * Gaussians come from the inverse CDF of a Philox uniform.
 */
class RngStream {
  public:
    RngStream() = default;
    RngStream(std::uint64_t base_seed, std::uint64_t stream_id);

    std::uint64_t base_seed() const { return base_seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Next unconsumed cell; advanced by the sequential sampling API.
    std::uint64_t counter() const { return counter_; }
    void set_counter(std::uint64_t c) { counter_ = c; }
    std::uint64_t take_cell() { return counter_++; }

    /// Two independent N(0,1) values for (cell, mode_rank).
    std::pair<double, double> gaussian_pair(std::uint64_t cell, std::uint64_t mode_rank) const;

    friend bool operator==(const RngStream&, const RngStream&) = default;

  private:
    std::uint64_t base_seed_ = 0;
    std::uint64_t stream_id_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace cascade
