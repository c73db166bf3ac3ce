#pragma once

#include <cstdint>
#include <vector>

#include "hilbertcloud/error.hpp"

namespace hcl {

/// 128-bit curve index; wide enough for d*p <= 128 (e.g. 3 dims at 21
/// bits/axis for sub-micrometer cells over a 30 m scene).
using uint128 = unsigned __int128;

/// Grid geometry shared by all curve codecs: `dims` axes, `order` bits per
/// axis. The grid has 2^order cells along each axis.
struct CurveConfig {
    int dims;
    int order;

    CurveConfig(int dims_, int order_);

    int key_bits() const { return dims * order; }
    int key_bytes() const { return (key_bits() + 7) / 8; }

    /// Largest valid coordinate component, 2^order - 1.
    std::uint64_t max_coord() const;

    /// One past the largest valid index; 0 means the full 128-bit range.
    uint128 index_count() const;
};

/// A cell of the grid: one unsigned component per axis, each < 2^order.
struct GridCoordinate {
    std::vector<std::uint64_t> coords;

    GridCoordinate() = default;
    explicit GridCoordinate(std::vector<std::uint64_t> c) : coords(std::move(c)) {}

    bool operator==(const GridCoordinate&) const = default;
};

/// Position of a cell along a space-filling curve, in [0, 2^(dims*order)).
struct HilbertIndex {
    uint128 value = 0;

    bool operator==(const HilbertIndex&) const = default;
};

/// Maps a grid cell to its position along the Hilbert curve.
///
/// Orientation convention: index 0 is the all-zeros cell and the order-1
/// 2-D curve visits (0,0) -> (0,1) -> (1,1) -> (1,0). Bijective over the
/// full grid; consecutive indices decode to cells at L1 distance 1.
HilbertIndex hilbert_encode(const GridCoordinate& c, const CurveConfig& cfg);

/// Exact inverse of hilbert_encode.
GridCoordinate hilbert_decode(HilbertIndex i, const CurveConfig& cfg);

/// Morton (Z-order) index: bit j of axis k lands at output bit j*dims + k,
/// axis 0 least significant.
HilbertIndex morton_encode(const GridCoordinate& c, const CurveConfig& cfg);

/// Exact inverse of morton_encode.
GridCoordinate morton_decode(HilbertIndex i, const CurveConfig& cfg);

}  // namespace hcl
