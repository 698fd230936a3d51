#pragma once

#include <array>
#include <cstdint>

namespace vcontract {

// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

// Standard normals for one path. Counter words: {block, stream offset, path lo, path hi},
// key = master seed. Box-Muller on two 53-bit uniforms per block gives two normals.
class NormalStream {
public:
    NormalStream(std::uint64_t master_seed, std::uint64_t path_index,
                 std::uint32_t stream_offset = 0);

    double next();

private:
    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint32_t, 2> key_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

} // namespace vcontract
