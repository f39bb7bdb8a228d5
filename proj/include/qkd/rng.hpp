#pragma once

#include <cstdint>

namespace qkd {

// Small deterministic PRNG (xoshiro256++ seeded through splitmix64).
// Standard-library distributions are implementation-defined, so uniforms
// and Bernoulli draws are built directly from the raw stream to keep
// results bit-identical across platforms.

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
    }

    /// Independent stream for a work chunk: reseeds from (seed, index).
    static Rng for_chunk(uint64_t seed, uint64_t chunk_index) {
        uint64_t sm = seed;
        const uint64_t mixed = splitmix64(sm) ^ (0x9e3779b97f4a7c15ULL * (chunk_index + 1));
        return Rng(mixed);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_double() < p; }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t s_[4];
};

}  // namespace qkd
