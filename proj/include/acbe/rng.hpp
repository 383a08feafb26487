#pragma once

#include <array>
#include <cstdint>
#include <cstddef>

// Counter-based random number generation. Every (path, mode, purpose) triple
// owns an independent Philox stream derived from the master seed, so the
// randomness of a given mode does not depend on the truncation level M, the
// number of paths, or the thread schedule.

namespace acbe::rng {

/// Philox 4x64 block cipher with 10 rounds. Maps (counter, key) to four
/// 64-bit words; distinct counters yield independent outputs.
std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& counter,
                                        const std::array<std::uint64_t, 2>& key);

enum class StreamPurpose : std::uint64_t {
    increments = 1,     // Wiener increments
    ou_bridge = 2,      // extra Gaussians for the conditional convolution draw
    field_sampler = 3,  // random test fields (Lipschitz probe etc.)
};

/// Packs (purpose, path, mode) into the second key word.
/// Layout: purpose in the top byte, path below, mode in the low 20 bits.
std::uint64_t make_stream_id(StreamPurpose purpose, std::uint64_t path_index,
                             std::uint64_t mode_index);

/// Standard normal stream over a Philox keyed by (master_seed, stream_id).
/// Deterministic: the n-th draw depends only on the key and n. Uses
/// Box-Muller on 53-bit uniforms, four normals per Philox block.
class NormalStream {
public:
    NormalStream(std::uint64_t master_seed, std::uint64_t stream_id);

    double next();
    void fill(double* out, std::size_t n);

private:
    void refill();

    std::array<std::uint64_t, 2> key_;
    std::uint64_t block_index_ = 0;
    std::array<double, 4> buffer_{};
    int buffered_ = 0;
};

}  // namespace acbe::rng
