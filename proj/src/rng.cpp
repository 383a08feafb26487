#include "acbe/rng.hpp"

#include <cmath>

namespace acbe::rng {
namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

// Maps a 64-bit word to (0,1): 53 uniform bits, zero nudged to 2^-53.
inline double to_open_unit(std::uint64_t w) {
    std::uint64_t m = w >> 11;
    if (m == 0) m = 1;
    return static_cast<double>(m) * 0x1p-53;
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& counter,
                                        const std::array<std::uint64_t, 2>& key) {
    std::array<std::uint64_t, 4> c = counter;
    std::array<std::uint64_t, 2> k = key;
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    return c;
}

std::uint64_t make_stream_id(StreamPurpose purpose, std::uint64_t path_index,
                             std::uint64_t mode_index) {
    return (static_cast<std::uint64_t>(purpose) << 56) | (path_index << 20) |
           (mode_index & 0xFFFFFULL);
}

NormalStream::NormalStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : key_{master_seed, stream_id} {}

void NormalStream::refill() {
    auto words = philox4x64({block_index_, 0, 0, 0}, key_);
    ++block_index_;
    for (int pair = 0; pair < 2; ++pair) {
        double u1 = to_open_unit(words[2 * pair]);
        double u2 = to_open_unit(words[2 * pair + 1]);
        double radius = std::sqrt(-2.0 * std::log(u1));
        buffer_[2 * pair] = radius * std::cos(kTwoPi * u2);
        buffer_[2 * pair + 1] = radius * std::sin(kTwoPi * u2);
    }
    buffered_ = 4;
}

double NormalStream::next() {
    if (buffered_ == 0) refill();
    return buffer_[4 - buffered_--];
}

void NormalStream::fill(double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = next();
}

}  // namespace acbe::rng
