#pragma once

#include <cmath>
#include <cstdint>

namespace cbcast {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Deterministic stream cipher-style generator. Trial streams are derived
/// from (seed, stream) only, so results do not depend on scheduling.
class Rng {
  public:
    explicit Rng(uint64_t seed, uint64_t stream = 0)
        : state_(splitmix64(splitmix64(seed) ^ (0x100000001b3ull * (stream + 1)))) {}

    uint64_t u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    /// Uniform in [0, n), bias-free by rejection.
    uint64_t uniform(uint64_t n) {
        const uint64_t limit = n * (UINT64_MAX / n);
        uint64_t x;
        do {
            x = u64();
        } while (x >= limit);
        return x % n;
    }

    double uniform01() { return double(u64() >> 11) * 0x1.0p-53; }

    double normal() {
        // Box-Muller; fixed formula keeps the stream platform-independent.
        double u1 = uniform01();
        while (u1 <= 0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

  private:
    uint64_t state_;
};

/// Keyed hash of a tuple index, for reproducible random bin assignment.
inline uint64_t keyed_hash(uint64_t key, uint64_t value) {
    return splitmix64(splitmix64(key ^ 0x243f6a8885a308d3ull) ^ value);
}

}  // namespace cbcast
