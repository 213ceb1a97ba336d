#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace psea {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Reproducible substream: the engine seed is a hash of (master seed, stream id),
// so distinct stream ids give independent streams regardless of draw order or
// thread placement.
class RngHandle {
public:
    RngHandle(std::uint64_t master_seed, std::uint64_t stream_id)
        : eng_(splitmix64(splitmix64(master_seed) ^ splitmix64(~stream_id))) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, n) by rejection, no modulo bias.
    std::uint64_t uniform_below(std::uint64_t n) {
        if (n == 0) return 0;
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }

    // Uniform in (0, 1]; never returns 0 so log() below is safe.
    double uniform01() {
        return ((double)(eng_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double exponential(double rate) { return -std::log(uniform01()) / rate; }

private:
    std::mt19937_64 eng_;
};

} // namespace psea
