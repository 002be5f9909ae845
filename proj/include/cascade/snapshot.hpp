#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cascade/grid.hpp"

namespace cascade {

enum class SnapshotDtype : std::uint32_t { complex64 = 1, complex128 = 2 };

inline constexpr std::size_t kSnapshotHeaderBytes = 32;

/*
 * Field snapshot layout, all little-endian:
 *   [0,8)   magic "CSLFIELD"
 *   [8,12)  n      int32
 *   [12,16) N      int32
 *   [16,20) D      int32
 *   [20,24) dtype  uint32 (1 = complex64, 2 = complex128)
 *   [24,32) zero
 * followed by D^n (re, im) pairs in mode-rank order.
 */
std::vector<std::uint8_t> encode_snapshot(const SpectralField& u,
                                          SnapshotDtype dtype = SnapshotDtype::complex128);
SpectralField decode_snapshot(std::span<const std::uint8_t> bytes);

void write_snapshot(std::ostream& os, const SpectralField& u,
                    SnapshotDtype dtype = SnapshotDtype::complex128);
SpectralField read_snapshot(std::istream& is);

// little-endian helpers shared with the checkpoint format
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v);
void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v);
void put_f64(std::vector<std::uint8_t>& out, double v);
std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at);
std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t at);
double get_f64(std::span<const std::uint8_t> in, std::size_t at);

}  // namespace cascade
