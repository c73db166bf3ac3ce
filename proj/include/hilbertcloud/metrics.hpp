#pragma once

#include <string>
#include <vector>

#include "hilbertcloud/cloud.hpp"
#include "hilbertcloud/sinkhorn.hpp"

namespace hcl {

/// Symmetric squared-Euclidean Chamfer distance, mean-reduced on both sides:
/// mean_i min_j |x_i - y_j|^2 + mean_j min_i |y_j - x_i|^2.
double chamfer(const PointCloud& X, const PointCloud& Y);

enum class EmdMode { exact, sinkhorn };

/// Earth mover's distance between equal-size clouds. exact solves the
/// assignment problem (n <= 64); sinkhorn reports the converged transport
/// cost <P,C> without the entropy term, so both modes estimate the same
/// quantity.
double emd(const PointCloud& X, const PointCloud& Y, EmdMode mode,
           const SinkhornParams& p = SinkhornParams{},
           GroundMetric metric = GroundMetric::sq_euclidean);

/// Mean Euclidean distance between consecutive points of the permuted cloud:
/// (1/(n-1)) sum_k |p[perm[k+1]] - p[perm[k]]|.
double locality_score(const PointCloud& pc, const Permutation& perm);

struct LocalityEntry {
    std::string scheme;
    double mean_consecutive = 0.0;
    double normalized = 0.0;  // mean_consecutive / mean nearest-neighbor distance
};

struct LocalityReport {
    double mean_nn_distance = 0.0;
    std::vector<LocalityEntry> entries;  // hilbert, morton, lex
};

/// Locality scores of the hilbert, morton and lex orderings of one cloud,
/// plus the scale-free normalized variant.
LocalityReport compare_orderings(const PointCloud& pc, const CurveConfig& cfg);

}  // namespace hcl
