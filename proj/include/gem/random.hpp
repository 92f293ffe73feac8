#pragma once

#include <cstdint>
#include <random>

namespace gem {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent stream seeds from a root seed.
constexpr std::uint64_t mix_seed(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for stream `counter` under `root`. Streams for distinct counters are independent.
constexpr std::uint64_t split_seed(std::uint64_t root, std::uint64_t counter)
{
    return mix_seed(mix_seed(root) ^ mix_seed(counter + 0x632be59bd9b4e019ULL));
}

// The standard distributions are implementation-defined; these are not, so seeded runs
// reproduce across standard libraries.

/// Uniform double in [0, 1) with 53 bits of randomness.
inline double uniform01(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi)
{
    return lo + (hi - lo) * uniform01(rng);
}

/// Uniform integer in [0, n). Rejection sampling removes modulo bias.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n)
{
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x = rng();
    while (x >= limit) {
        x = rng();
    }
    return x % n;
}

/// Standard normal via Box-Muller (one value per call).
double standard_normal(Rng& rng);

}  // namespace gem
