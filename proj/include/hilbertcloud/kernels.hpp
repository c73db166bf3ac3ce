#pragma once

// Hot loops, each in two variants: the OpenMP-parallel kernel the library
// calls, and a plain serial reference kept for equivalence tests and the
// benchmark tool. Every parallel loop writes disjoint elements with the same
// per-element arithmetic as the serial path, so results are bit-identical
// for any thread count.

#include <cstddef>
#include <span>

#include "hilbertcloud/cloud.hpp"

namespace hcl::kernels {

/// Quantizes every point against bb and encodes it on the selected curve.
/// out.size() must equal pc.size().
void curve_keys(const PointCloud& pc, const BoundingBox& bb, const CurveConfig& cfg,
                OrderScheme scheme, std::span<uint128> out);
void curve_keys_serial(const PointCloud& pc, const BoundingBox& bb, const CurveConfig& cfg,
                       OrderScheme scheme, std::span<uint128> out);

/// Dense cost matrix C[i*m + j] = metric(X.row(i), Y.row(j)).
void pairwise_cost(const PointCloud& X, const PointCloud& Y, GroundMetric metric,
                   std::span<double> out);
void pairwise_cost_serial(const PointCloud& X, const PointCloud& Y, GroundMetric metric,
                          std::span<double> out);

/// out[i] = min over j of squared Euclidean distance from X.row(i) to
/// Y.row(j). Used by the Chamfer and nearest-neighbor statistics.
void nn_min_sqdist(const PointCloud& X, const PointCloud& Y, std::span<double> out);
void nn_min_sqdist_serial(const PointCloud& X, const PointCloud& Y, std::span<double> out);

/// out[i] = min over j != i of squared Euclidean distance inside one cloud.
/// Needs at least 2 points.
void self_nn_min_sqdist(const PointCloud& pc, std::span<double> out);
void self_nn_min_sqdist_serial(const PointCloud& pc, std::span<double> out);

/// FPS relaxation step: min_sqdist[i] = min(min_sqdist[i], |pc.row(i) - p|^2).
void fps_relax(const PointCloud& pc, const double* p, std::span<double> min_sqdist);
void fps_relax_serial(const PointCloud& pc, const double* p, std::span<double> min_sqdist);

/// One Sinkhorn log-domain half-step over rows of an n x m cost matrix:
/// for each row i, f[i] = eps * log_weight - eps * LSE_j((g[j] - C[i][j]) / eps).
/// With transposed = true the same update runs over columns (g from f).
void softmin_update(std::span<const double> cost, std::size_t rows, std::size_t cols,
                    bool transposed, double eps, double log_weight,
                    std::span<const double> other, std::span<double> out);
void softmin_update_serial(std::span<const double> cost, std::size_t rows, std::size_t cols,
                           bool transposed, double eps, double log_weight,
                           std::span<const double> other, std::span<double> out);

/// Multiplicative Sinkhorn half-step: out[i] = weight / sum_j K[i][j] * other[j]
/// (rows of K, or columns when transposed).
void scaling_update(std::span<const double> kernel, std::size_t rows, std::size_t cols,
                    bool transposed, double weight, std::span<const double> other,
                    std::span<double> out);
void scaling_update_serial(std::span<const double> kernel, std::size_t rows, std::size_t cols,
                           bool transposed, double weight, std::span<const double> other,
                           std::span<double> out);

}  // namespace hcl::kernels
