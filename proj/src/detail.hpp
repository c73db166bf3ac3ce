#pragma once

// Internal allocation-free codec and quantization cores shared by the public
// API in hilbert.cpp/cloud.cpp and the batch kernels. Inputs are assumed
// validated by the caller.

#include <cmath>
#include <cstdint>

#include "hilbertcloud/hilbert.hpp"

namespace hcl::detail {

inline uint128 lane_mask(int dims) {
    return dims >= 128 ? ~uint128{0} : (uint128{1} << dims) - 1;
}

inline uint128 rotl(uint128 x, int m, int dims, uint128 mask) {
    m %= dims;
    if (m == 0) return x & mask;
    return ((x << m) | (x >> (dims - m))) & mask;
}

inline uint128 rotr(uint128 x, int m, int dims, uint128 mask) {
    m %= dims;
    if (m == 0) return x & mask;
    return ((x >> m) | (x << (dims - m))) & mask;
}

inline uint128 gray(uint128 i) { return i ^ (i >> 1); }

inline uint128 gray_inverse(uint128 g, int dims) {
    for (int shift = 1; shift < dims; shift <<= 1) g ^= g >> shift;
    return g;
}

inline int trailing_ones(uint128 w) {
    int n = 0;
    while (w & 1) {
        w >>= 1;
        ++n;
    }
    return n;
}

inline uint128 subcube_entry(uint128 w) {
    return w == 0 ? uint128{0} : gray(2 * ((w - 1) / 2));
}

inline int subcube_direction(uint128 w, int dims) {
    if (w == 0) return 0;
    if ((w & 1) == 0) return trailing_ones(w - 1) % dims;
    return trailing_ones(w) % dims;
}

inline uint128 hilbert_key(const std::uint64_t* c, int dims, int order) {
    const uint128 mask = lane_mask(dims);
    uint128 h = 0, entry = 0;
    int dir = 0;
    for (int bit = order - 1; bit >= 0; --bit) {
        uint128 lane = 0;
        for (int k = 0; k < dims; ++k)
            lane |= static_cast<uint128>((c[k] >> bit) & 1) << k;
        lane = rotr(lane ^ entry, dir + 1, dims, mask);
        const uint128 w = gray_inverse(lane, dims);
        entry ^= rotl(subcube_entry(w), dir + 1, dims, mask);
        dir = (dir + subcube_direction(w, dims) + 1) % dims;
        h = (h << dims) | w;
    }
    return h;
}

inline void hilbert_unkey(uint128 h, int dims, int order, std::uint64_t* c) {
    const uint128 mask = lane_mask(dims);
    for (int k = 0; k < dims; ++k) c[k] = 0;
    uint128 entry = 0;
    int dir = 0;
    for (int bit = order - 1; bit >= 0; --bit) {
        const uint128 w = (h >> (bit * dims)) & mask;
        const uint128 lane = rotl(gray(w), dir + 1, dims, mask) ^ entry;
        for (int k = 0; k < dims; ++k)
            c[k] |= static_cast<std::uint64_t>((lane >> k) & 1) << bit;
        entry ^= rotl(subcube_entry(w), dir + 1, dims, mask);
        dir = (dir + subcube_direction(w, dims) + 1) % dims;
    }
}

inline uint128 morton_key(const std::uint64_t* c, int dims, int order) {
    uint128 m = 0;
    for (int j = 0; j < order; ++j)
        for (int k = 0; k < dims; ++k)
            m |= static_cast<uint128>((c[k] >> j) & 1) << (j * dims + k);
    return m;
}

inline void morton_unkey(uint128 m, int dims, int order, std::uint64_t* c) {
    for (int k = 0; k < dims; ++k) c[k] = 0;
    for (int j = 0; j < order; ++j)
        for (int k = 0; k < dims; ++k)
            c[k] |= static_cast<std::uint64_t>((m >> (j * dims + k)) & 1) << j;
}

// Round-to-nearest quantization of one coordinate onto [0, max_coord].
// Returns false when x lies outside [lo, hi] (including NaN).
inline bool quantize_axis(double x, double lo, double hi, std::uint64_t max_coord,
                          std::uint64_t& out) {
    if (!(x >= lo && x <= hi)) return false;
    if (hi <= lo) {
        out = 0;
        return true;
    }
    const double scale = static_cast<double>(max_coord);
    double g = std::floor((x - lo) / (hi - lo) * scale + 0.5);
    if (g <= 0.0) {
        out = 0;
    } else if (g >= scale) {
        out = max_coord;
    } else {
        out = static_cast<std::uint64_t>(g);
    }
    return true;
}

}  // namespace hcl::detail
