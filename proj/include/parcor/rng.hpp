#pragma once

#include <cmath>
#include <cstdint>

// Deterministic RNG streams.  Every Monte Carlo task draws from its own
// stream derived as stream(base_seed, task_index), so results are
// independent of scheduling and worker count.  The generator is
// xoshiro256++ seeded through splitmix64; normal deviates use Box-Muller
// (std::normal_distribution is implementation-defined, this is not).

namespace parcor {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
  public:
    Rng() : Rng(0, 0) {}
    Rng(uint64_t base_seed, uint64_t stream_index) {
        uint64_t sm = base_seed;
        splitmix64(sm);
        sm ^= 0x6a09e667f3bcc909ULL + stream_index * 0x61c8864680b583ebULL;
        for (auto& w : s_) w = splitmix64(sm);
        have_spare_ = false;
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

    // Uniform in [0,1).
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0,1], safe as a log argument.
    double next_double_open() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // Standard normal, Box-Muller with a cached spare.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u = next_double_open();
        double v = next_double();
        double r = std::sqrt(-2.0 * std::log(u));
        double a = 6.283185307179586476925286766559 * v;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    uint64_t next_below(uint64_t bound) { return next_u64() % bound; }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
    double spare_ = 0;
    bool have_spare_ = false;
};

// Stable 64-bit mix of several tags, used to derive nested stream indices
// (e.g. per cube, per lattice point, per stencil leg).
inline uint64_t mix_tags(uint64_t a, uint64_t b = 0, uint64_t c = 0, uint64_t d = 0) {
    uint64_t s = a;
    splitmix64(s);
    s ^= b + 0x9e3779b97f4a7c15ULL;
    splitmix64(s);
    s ^= c + 0xc2b2ae3d27d4eb4fULL;
    splitmix64(s);
    s ^= d + 0x165667b19e3779f9ULL;
    return splitmix64(s);
}

}  // namespace parcor
