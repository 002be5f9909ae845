#include <cstring>
#include <iterator>

#include "cascade/integrators.hpp"
#include "cascade/snapshot.hpp"

namespace cascade {

namespace {

constexpr char kMagic[8] = {'C', 'S', 'L', 'C', 'H', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 16 + 6 * 8;

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const TrajectoryState& st, double dt) {
    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    put_u32(out, kVersion);
    put_u32(out, 0);
    put_u64(out, st.step_index);
    put_f64(out, dt);
    put_f64(out, st.t);
    put_u64(out, st.rng.base_seed());
    put_u64(out, st.rng.stream_id());
    put_u64(out, st.rng.counter());
    const auto snap = encode_snapshot(st.u, SnapshotDtype::complex128);
    out.insert(out.end(), snap.begin(), snap.end());
    return out;
}

TrajectoryState decode_checkpoint(std::span<const std::uint8_t> bytes, double expected_dt) {
    if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 8) != 0)
        throw Error("checkpoint: bad magic");
    if (get_u32(bytes, 8) != kVersion) throw Error("checkpoint: unsupported version");
    TrajectoryState st;
    st.step_index = get_u64(bytes, 16);
    const double dt = get_f64(bytes, 24);
    if (dt != expected_dt) throw Error("checkpoint: dt differs from the run configuration");
    st.t = get_f64(bytes, 32);
    st.rng = RngStream(get_u64(bytes, 40), get_u64(bytes, 48));
    st.rng.set_counter(get_u64(bytes, 56));
    st.u = decode_snapshot(bytes.subspan(kHeaderBytes));
    return st;
}

}  // namespace cascade
