#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace qwalk {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). The key is
// the master seed and the upper half of the counter selects the substream, so
// substream i of seed s is reproducible independent of how many other
// substreams exist or in which order they are consumed.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }
};

// UniformRandomBitGenerator over one Philox substream.
class StreamRng {
public:
    using result_type = std::uint64_t;

    StreamRng(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (cached_ == 0) {
            const Philox4x32::Counter ctr{static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                                          static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
            ++counter_;
            const auto out = Philox4x32::block(ctr, key_);
            buffer_[0] = (std::uint64_t{out[1]} << 32) | out[0];
            buffer_[1] = (std::uint64_t{out[3]} << 32) | out[2];
            cached_ = 2;
        }
        return buffer_[2 - cached_--];
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    std::uint64_t seed() const { return (std::uint64_t{key_[1]} << 32) | key_[0]; }
    std::uint64_t stream() const { return stream_; }

private:
    Philox4x32::Key key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int cached_ = 0;
};

}  // namespace qwalk
