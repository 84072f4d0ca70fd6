#pragma once

#include <array>
#include <cstdint>

namespace seamsim {

// Philox4x32-10 counter-based generator. Every (seed, c0, c1, c2) triple
// addresses an independent 128-bit block, which is what makes sampling
// bit-exact under any partitioning of work: streams are keyed by
// (instruction index, batch index) and never share state.
struct Philox4x32 {
    static std::array<uint32_t, 4> block(uint64_t seed, uint32_t c0, uint32_t c1, uint32_t c2,
                                         uint32_t c3) {
        uint32_t k0 = static_cast<uint32_t>(seed);
        uint32_t k1 = static_cast<uint32_t>(seed >> 32);
        uint32_t x0 = c0, x1 = c1, x2 = c2, x3 = c3;
        for (int round = 0; round < 10; ++round) {
            const uint64_t m0 = 0xD2511F53ull * x0;
            const uint64_t m1 = 0xCD9E8D57ull * x2;
            const uint32_t hi0 = static_cast<uint32_t>(m0 >> 32);
            const uint32_t lo0 = static_cast<uint32_t>(m0);
            const uint32_t hi1 = static_cast<uint32_t>(m1 >> 32);
            const uint32_t lo1 = static_cast<uint32_t>(m1);
            x0 = hi1 ^ x1 ^ k0;
            x1 = lo1;
            x2 = hi0 ^ x3 ^ k1;
            x3 = lo0;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        return {x0, x1, x2, x3};
    }
};

// Uniform doubles drawn from the (instruction, batch) substream. The
// draw counter advances through counter word c2.
class CounterStream {
  public:
    CounterStream(uint64_t seed, uint32_t instruction, uint32_t batch)
        : seed_(seed), c0_(instruction), c1_(batch) {}

    // 53-bit uniform in [0, 1).
    double next_double() {
        if (avail_ == 0) {
            buf_ = Philox4x32::block(seed_, c0_, c1_, block_++, 0);
            avail_ = 2;
        }
        --avail_;
        const uint64_t bits =
            (static_cast<uint64_t>(buf_[2 * avail_]) << 32) | buf_[2 * avail_ + 1];
        return static_cast<double>(bits >> 11) * 0x1.0p-53;
    }

  private:
    uint64_t seed_;
    uint32_t c0_, c1_;
    uint32_t block_ = 0;
    std::array<uint32_t, 4> buf_{};
    int avail_ = 0;
};

// splitmix64: used to derive per-point seeds from the config seed.
inline uint64_t mix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

} // namespace seamsim
