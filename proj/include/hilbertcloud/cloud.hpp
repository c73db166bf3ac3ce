#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hilbertcloud/hilbert.hpp"

namespace hcl {

/// Dense n x d coordinate array in meters, row-major. LiDAR frames are d=3
/// on ingest and d=2 after projection; 1-D clouds are accepted for the
/// metric/transport routines.
struct PointCloud {
    int dims = 0;
    std::vector<double> data;

    PointCloud() = default;
    explicit PointCloud(int d) : dims(d) {}
    PointCloud(int d, std::vector<double> values) : dims(d), data(std::move(values)) {}

    std::size_t size() const { return dims > 0 ? data.size() / dims : 0; }
    double* row(std::size_t i) { return data.data() + i * dims; }
    const double* row(std::size_t i) const { return data.data() + i * dims; }
    double at(std::size_t i, int k) const { return data[i * dims + k]; }

    void push(const double* p) { data.insert(data.end(), p, p + dims); }

    bool operator==(const PointCloud&) const = default;
};

/// True iff every coordinate is finite.
bool all_finite(const PointCloud& pc);

/// Componentwise min/max corners, d entries each.
struct BoundingBox {
    std::vector<double> min, max;
};

/// A bijection on [0, n): order[k] is the input row that lands at output
/// row k.
struct Permutation {
    std::vector<std::size_t> order;

    std::size_t size() const { return order.size(); }
    bool is_valid() const;
};

/// Ground cost between two points.
enum class GroundMetric { sq_euclidean, euclidean, l1 };

/// Grid resolution used by the sorting routines when the caller does not
/// pick one: 1024 cells per axis, finer than typical LiDAR point spacing
/// over a 30 m extent.
inline constexpr int kDefaultSortOrder = 10;

enum class OrderScheme { hilbert, morton, lex };

/// Componentwise min/max over all points. Throws DomainError on an empty
/// cloud or non-finite coordinates.
BoundingBox bounding_box(const PointCloud& pc);

/// Affine map of each axis from [min, max] onto the integer grid
/// [0, 2^order - 1], round-to-nearest with clamp; a zero-extent axis maps
/// to 0. Points outside the box are a DomainError.
std::vector<GridCoordinate> quantize(const PointCloud& pc, const BoundingBox& bb,
                                     const CurveConfig& cfg);

struct SortResult {
    PointCloud cloud;
    Permutation perm;
};

/// Reorders the cloud by Hilbert index: bounding box, quantization, per-point
/// encoding, stable LSD radix sort on the index bytes. Ties (equal indices)
/// keep their input order; the returned cloud is exactly the permutation
/// applied to the input.
SortResult hilbert_sort(const PointCloud& pc, const CurveConfig& cfg);

/// Permutation sorting by the chosen key: hilbert/morton via the curve
/// codecs, lex by lexicographic comparison of raw coordinates. All stable.
Permutation order_by(const PointCloud& pc, OrderScheme scheme, const CurveConfig& cfg);

/// Greedy farthest point sampling: the first point is a seeded uniform draw,
/// each next point maximizes its minimum Euclidean distance to the chosen
/// set (ties broken toward the lowest index). Deterministic for fixed seed.
PointCloud fps_subsample(const PointCloud& pc, std::size_t m, std::uint64_t seed);

/// New cloud with row k = pc.row(perm.order[k]).
PointCloud apply_permutation(const PointCloud& pc, const Permutation& perm);

}  // namespace hcl
