#include "vcontract/rng.hpp"

#include <cmath>
#include <numbers>

namespace vcontract {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = std::uint64_t(a) * b;
    hi = std::uint32_t(p >> 32);
    lo = std::uint32_t(p);
}

inline double unit(std::uint32_t a, std::uint32_t b) {
    const std::uint64_t bits = ((std::uint64_t(a) << 32) | b) >> 11;
    return (double(bits) + 0.5) * 0x1.0p-53; // open interval (0, 1)
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            k[0] += kW0;
            k[1] += kW1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kM0, c[0], hi0, lo0);
        mulhilo(kM1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

NormalStream::NormalStream(std::uint64_t master_seed, std::uint64_t path_index,
                           std::uint32_t stream_offset)
    : ctr_{0u, stream_offset, std::uint32_t(path_index), std::uint32_t(path_index >> 32)},
      key_{std::uint32_t(master_seed), std::uint32_t(master_seed >> 32)} {}

double NormalStream::next() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const auto w = philox4x32(ctr_, key_);
    ++ctr_[0];
    const double u1 = unit(w[0], w[1]);
    const double u2 = unit(w[2], w[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(th);
    has_cached_ = true;
    return r * std::cos(th);
}

} // namespace vcontract
