#include "cascade/snapshot.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <iterator>
#include <ostream>

namespace cascade {

namespace {

constexpr char kMagic[8] = {'C', 'S', 'L', 'F', 'I', 'E', 'L', 'D'};

void put_f32(std::vector<std::uint8_t>& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

}  // namespace

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
    if (at + 4 > in.size()) throw Error("truncated binary record");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{in[at + static_cast<std::size_t>(i)]} << (8 * i);
    return v;
}

std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t at) {
    if (at + 8 > in.size()) throw Error("truncated binary record");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{in[at + static_cast<std::size_t>(i)]} << (8 * i);
    return v;
}

double get_f64(std::span<const std::uint8_t> in, std::size_t at) {
    return std::bit_cast<double>(get_u64(in, at));
}

std::vector<std::uint8_t> encode_snapshot(const SpectralField& u, SnapshotDtype dtype) {
    const GridSpec& g = u.grid();
    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    put_u32(out, static_cast<std::uint32_t>(g.dim()));
    put_u32(out, static_cast<std::uint32_t>(g.points()));
    put_u32(out, static_cast<std::uint32_t>(g.modes()));
    put_u32(out, static_cast<std::uint32_t>(dtype));
    put_u64(out, 0);
    for (const Complex& z : u.coeffs()) {
        if (dtype == SnapshotDtype::complex64) {
            put_f32(out, static_cast<float>(z.real()));
            put_f32(out, static_cast<float>(z.imag()));
        } else {
            put_f64(out, z.real());
            put_f64(out, z.imag());
        }
    }
    return out;
}

SpectralField decode_snapshot(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kSnapshotHeaderBytes || std::memcmp(bytes.data(), kMagic, 8) != 0)
        throw Error("snapshot: bad magic");
    const auto n = static_cast<int>(get_u32(bytes, 8));
    const auto N = static_cast<int>(get_u32(bytes, 12));
    const auto D = static_cast<int>(get_u32(bytes, 16));
    const auto tag = get_u32(bytes, 20);
    if (tag != 1 && tag != 2) throw Error("snapshot: unknown dtype tag " + std::to_string(tag));
    GridSpec grid(n, N, D);
    const std::size_t width = tag == 1 ? 8 : 16;
    if (bytes.size() != kSnapshotHeaderBytes + width * grid.mode_count())
        throw Error("snapshot: payload size does not match header");
    std::vector<Complex> coeffs(grid.mode_count());
    std::size_t at = kSnapshotHeaderBytes;
    for (Complex& z : coeffs) {
        if (tag == 1) {
            const float re = std::bit_cast<float>(get_u32(bytes, at));
            const float im = std::bit_cast<float>(get_u32(bytes, at + 4));
            z = {re, im};
        } else {
            z = {get_f64(bytes, at), get_f64(bytes, at + 8)};
        }
        at += width;
    }
    return SpectralField(grid, std::move(coeffs));
}

void write_snapshot(std::ostream& os, const SpectralField& u, SnapshotDtype dtype) {
    const auto bytes = encode_snapshot(u, dtype);
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

SpectralField read_snapshot(std::istream& is) {
    std::vector<std::uint8_t> header(kSnapshotHeaderBytes);
    is.read(reinterpret_cast<char*>(header.data()), static_cast<std::streamsize>(header.size()));
    if (!is) throw Error("snapshot: truncated header");
    const auto tag = get_u32(header, 20);
    GridSpec grid(static_cast<int>(get_u32(header, 8)), static_cast<int>(get_u32(header, 12)),
                  static_cast<int>(get_u32(header, 16)));
    const std::size_t width = tag == 1 ? 8 : 16;
    std::vector<std::uint8_t> bytes = header;
    bytes.resize(kSnapshotHeaderBytes + width * grid.mode_count());
    is.read(reinterpret_cast<char*>(bytes.data() + kSnapshotHeaderBytes),
            static_cast<std::streamsize>(bytes.size() - kSnapshotHeaderBytes));
    if (!is) throw Error("snapshot: truncated payload");
    return decode_snapshot(bytes);
}

}  // namespace cascade
