#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace fracsep {

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Threefry2x64, 20 rounds. Counter-based: stream position is (counter, key),
// so replicas get independent reproducible streams regardless of thread schedule.
class Rng {
  public:
    Rng(uint64_t key0, uint64_t key1) : k0_(key0), k1_(key1) {}

    // stream keyed by (seed, tag, replica); tag hashed, replica mixed in
    static Rng stream(uint64_t seed, std::string_view tag, uint64_t replica) {
        uint64_t s = fnv1a64(tag) ^ (0x9e3779b97f4a7c15ull * (replica + 1));
        return Rng(seed, splitmix64(s));
    }

    uint64_t next_u64() {
        if (have_) {
            have_ = false;
            return saved_;
        }
        uint64_t x0 = ctr_++, x1 = 0;
        block(x0, x1);
        saved_ = x1;
        have_ = true;
        return x0;
    }

    // 53-bit uniform in [0,1)
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in {0,...,bound-1}, unbiased by rejection
    uint64_t below(uint64_t bound) {
        uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    bool bernoulli(double p) { return uniform01() < p; }

    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

  private:
    void block(uint64_t& x0, uint64_t& x1) const {
        static constexpr int rot[8] = {16, 42, 12, 31, 16, 32, 24, 21};
        const uint64_t ks0 = k0_, ks1 = k1_;
        const uint64_t ks2 = 0x1bd11bdaa9fc1a22ull ^ ks0 ^ ks1;
        const uint64_t ks[3] = {ks0, ks1, ks2};
        x0 += ks0;
        x1 += ks1;
        for (int r = 0; r < 20; ++r) {
            x0 += x1;
            x1 = rotl(x1, rot[r % 8]);
            x1 ^= x0;
            if (r % 4 == 3) {
                uint64_t s = static_cast<uint64_t>(r / 4) + 1;
                x0 += ks[s % 3];
                x1 += ks[(s + 1) % 3] + s;
            }
        }
    }

    static uint64_t rotl(uint64_t v, int n) { return (v << n) | (v >> (64 - n)); }

    uint64_t k0_, k1_;
    uint64_t ctr_ = 0;
    uint64_t saved_ = 0;
    bool have_ = false;
};

}  // namespace fracsep
