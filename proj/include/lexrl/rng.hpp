#pragma once

#include <cstdint>
#include <random>

namespace lexrl {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Decorrelated seed for a (stream, index) pair, so that workers, channels
/// and episodes all draw from independent generators derived from one
/// master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index = 0) {
    return splitmix64(splitmix64(master + 0x9e3779b97f4a7c15ULL * (stream + 1)) + index);
}

/// Uniform double in [lo, hi) from the top 53 bits of one engine draw.
inline double uniform_double(std::mt19937_64& rng, double lo, double hi) {
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + unit * (hi - lo);
}

/// Unbiased integer in [0, n); rejection keeps the draw exactly uniform.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t rem = (0 - n) % n;  // 2^64 mod n
    std::uint64_t r = rng();
    while (r < rem) {
        r = rng();
    }
    return r % n;
}

}  // namespace lexrl
