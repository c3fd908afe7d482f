#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace screenlap::rng {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).  A block
// cipher over a 128-bit counter with a 64-bit key: output depends only on
// (key, counter), so any partition of an index range over workers produces
// the same stream.

struct Philox4x32 {
    using ctr_t = std::array<std::uint32_t, 4>;
    using key_t = std::array<std::uint32_t, 2>;

    static constexpr std::uint32_t kMult0 = 0xD2511F53u;
    static constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static ctr_t run(ctr_t ctr, key_t key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t(kMult0) * ctr[0];
            const std::uint64_t p1 = std::uint64_t(kMult1) * ctr[2];
            const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
            const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

// One 128-bit block addressed by (seed, index, block): index is typically a
// sample number and block a draw counter within the sample.
inline Philox4x32::ctr_t philox_block(std::uint64_t seed, std::uint64_t index,
                                      std::uint32_t block) {
    const Philox4x32::ctr_t ctr = {std::uint32_t(index), std::uint32_t(index >> 32), block, 0u};
    const Philox4x32::key_t key = {std::uint32_t(seed), std::uint32_t(seed >> 32)};
    return Philox4x32::run(ctr, key);
}

inline double uniform_from_bits(std::uint32_t hi, std::uint32_t lo) {
    // 53 significant bits, mapped into (0,1] so log() below stays finite.
    const std::uint64_t bits = (std::uint64_t(hi) << 21) ^ (lo >> 11);
    return (double(bits & ((std::uint64_t(1) << 53) - 1)) + 1.0) * 0x1p-53;
}

// Two standard normals per counter block via Box-Muller.  Addressing by
// (seed, index, block) keeps results independent of how samples are split
// across threads.
inline std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t index,
                                         std::uint32_t block) {
    const auto words = philox_block(seed, index, block);
    const double u1 = uniform_from_bits(words[0], words[1]);
    const double u2 = uniform_from_bits(words[2], words[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

// Sequential view over the normals of one sample index.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t index) : seed_(seed), index_(index) {}

    double next() {
        if (phase_ == 0) {
            pair_ = normal_pair(seed_, index_, block_++);
            phase_ = 1;
            return pair_[0];
        }
        phase_ = 0;
        return pair_[1];
    }

private:
    std::uint64_t seed_;
    std::uint64_t index_;
    std::uint32_t block_ = 0;
    int phase_ = 0;
    std::array<double, 2> pair_{};
};

}  // namespace screenlap::rng
