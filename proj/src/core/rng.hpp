#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace meshdetect {

// splitmix64 step; used both as a seed scrambler and as the stream generator.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256** with a platform-independent output sequence. The standard
// library engines are deterministic but their distributions are not specified
// bit-for-bit, so all draws are derived from raw 64-bit outputs here.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    // Independent named substream of a base seed.
    static Rng substream(uint64_t base_seed, std::string_view name) {
        uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
        for (char c : name) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        uint64_t mix = base_seed ^ h;
        return Rng(splitmix64(mix));
    }

    // Seed for an indexed cell of a batch (sweep runs), derived from the base
    // seed by a counter scheme so cells are independent and reproducible.
    static uint64_t derive_seed(uint64_t base_seed, uint64_t cell_index) {
        uint64_t mix = base_seed ^ (0x9e3779b97f4a7c15ULL * (cell_index + 1));
        return splitmix64(mix);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). n must be > 0; modulo bias is negligible for
    // the small n used here but is removed anyway by rejection.
    uint64_t uniform_int(uint64_t n) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    double exponential(double mean) {
        double u;
        do {
            u = uniform();
        } while (u <= 0.0);
        return -mean * std::log(u);
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
};

} // namespace meshdetect
