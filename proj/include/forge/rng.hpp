#pragma once

#include <cstdint>

namespace forge {

// xoshiro256++ with splitmix64 seeding. All randomness in the library flows
// through this generator so that trajectories are reproducible from a single
// 64-bit seed, and independent streams can be derived with split().
class Rng {
public:
    Rng() : Rng(0x9e3779b97f4a7c15ULL) {}

    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto& word : state_) {
            word = splitmix64(x);
        }
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Unbiased integer in [0, n) via rejection of the biased tail.
    uint64_t next_below(uint64_t n) {
        const uint64_t threshold = (0 - n) % n;
        for (;;) {
            const uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform double in [0, 1) with 53 bits of precision.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Derives an independent child stream. Children with distinct tags (or
    // from generators in distinct states) do not share their parent's output.
    Rng split(uint64_t tag) {
        uint64_t mix = next_u64() ^ (0xd1342543de82ef95ULL * (tag + 1));
        return Rng(mix);
    }

    // Stateless stream derivation for indexed work (playout i of a batch).
    static uint64_t derive(uint64_t base, uint64_t stream) {
        uint64_t x = base ^ (0xd1342543de82ef95ULL * (stream + 0x632be59bd9b4e019ULL));
        return splitmix64(x);
    }

private:
    static uint64_t rotl(uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    static uint64_t splitmix64(uint64_t& x) {
        uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t state_[4];
};

}  // namespace forge
