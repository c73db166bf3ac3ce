#pragma once

#include <cstdint>
#include <random>

namespace hcl {

/// Seeded generator used everywhere randomness is called for. mt19937_64 has
/// a fixed spec, so identical seeds give identical streams on any platform;
/// the helpers below avoid std::*_distribution, whose output is
/// implementation-defined.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform draw from [0, n). n must be positive.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

/// Uniform double in [lo, hi).
inline double uniform_range(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

}  // namespace hcl
