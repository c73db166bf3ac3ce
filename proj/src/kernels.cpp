#include "hilbertcloud/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "detail.hpp"
#include "hilbertcloud/error.hpp"

namespace hcl::kernels {

namespace {

constexpr int kMaxDims = 3;

// Returns false when a point falls outside the box (or is NaN); parallel
// callers collect the flag and re-raise outside the loop.
inline bool key_of_point(const double* p, int dims, const BoundingBox& bb,
                         const CurveConfig& cfg, OrderScheme scheme, uint128& out) {
    std::uint64_t q[kMaxDims];
    const std::uint64_t max_coord = cfg.max_coord();
    for (int k = 0; k < dims; ++k)
        if (!detail::quantize_axis(p[k], bb.min[k], bb.max[k], max_coord, q[k])) return false;
    out = scheme == OrderScheme::hilbert ? detail::hilbert_key(q, dims, cfg.order)
                                         : detail::morton_key(q, dims, cfg.order);
    return true;
}

inline double point_cost(const double* a, const double* b, int dims, GroundMetric metric) {
    double acc = 0.0;
    switch (metric) {
        case GroundMetric::sq_euclidean:
        case GroundMetric::euclidean:
            for (int k = 0; k < dims; ++k) {
                const double d = a[k] - b[k];
                acc += d * d;
            }
            return metric == GroundMetric::euclidean ? std::sqrt(acc) : acc;
        case GroundMetric::l1:
            for (int k = 0; k < dims; ++k) acc += std::fabs(a[k] - b[k]);
            return acc;
    }
    return acc;
}

inline double sqdist(const double* a, const double* b, int dims) {
    double acc = 0.0;
    for (int k = 0; k < dims; ++k) {
        const double d = a[k] - b[k];
        acc += d * d;
    }
    return acc;
}

void check_cost_shapes(const PointCloud& X, const PointCloud& Y, std::size_t out_size) {
    if (X.dims != Y.dims) throw DomainError("cost matrix: dimension mismatch");
    if (out_size != X.size() * Y.size()) throw DomainError("cost matrix: bad output size");
}

inline double min_sqdist_to(const PointCloud& Y, const double* p, int dims) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < Y.size(); ++j) best = std::min(best, sqdist(p, Y.row(j), dims));
    return best;
}

inline double self_min_sqdist(const PointCloud& pc, std::size_t i) {
    double best = std::numeric_limits<double>::infinity();
    const double* p = pc.row(i);
    for (std::size_t j = 0; j < pc.size(); ++j)
        if (j != i) best = std::min(best, sqdist(p, pc.row(j), pc.dims));
    return best;
}

// Stable log-sum-exp over one row (or column) of (other[j] - C[i][j]) / eps.
inline double softmin_row(const double* cost, std::size_t rows, std::size_t cols,
                          bool transposed, std::size_t i, double eps,
                          const double* other) {
    const std::size_t len = transposed ? rows : cols;
    const std::size_t stride = transposed ? cols : 1;
    const double* base = transposed ? cost + i : cost + i * cols;
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < len; ++j) {
        const double t = (other[j] - base[j * stride]) / eps;
        hi = std::max(hi, t);
    }
    double s = 0.0;
    for (std::size_t j = 0; j < len; ++j) s += std::exp((other[j] - base[j * stride]) / eps - hi);
    return hi + std::log(s);
}

inline double scaling_row(const double* kernel, std::size_t rows, std::size_t cols,
                          bool transposed, std::size_t i, const double* other) {
    const std::size_t len = transposed ? rows : cols;
    const std::size_t stride = transposed ? cols : 1;
    const double* base = transposed ? kernel + i : kernel + i * cols;
    double s = 0.0;
    for (std::size_t j = 0; j < len; ++j) s += base[j * stride] * other[j];
    return s;
}

}  // namespace

void curve_keys_serial(const PointCloud& pc, const BoundingBox& bb, const CurveConfig& cfg,
                       OrderScheme scheme, std::span<uint128> out) {
    if (cfg.dims != pc.dims || pc.dims > kMaxDims)
        throw DomainError("curve keys: config dims must match the cloud (d <= 3)");
    if (out.size() != pc.size()) throw DomainError("curve keys: bad output size");
    for (std::size_t i = 0; i < pc.size(); ++i)
        if (!key_of_point(pc.row(i), pc.dims, bb, cfg, scheme, out[i]))
            throw DomainError("curve keys: point " + std::to_string(i) +
                              " outside the bounding box");
}

void curve_keys(const PointCloud& pc, const BoundingBox& bb, const CurveConfig& cfg,
                OrderScheme scheme, std::span<uint128> out) {
    if (cfg.dims != pc.dims || pc.dims > kMaxDims)
        throw DomainError("curve keys: config dims must match the cloud (d <= 3)");
    if (out.size() != pc.size()) throw DomainError("curve keys: bad output size");
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(pc.size());
    bool bad = false;
#pragma omp parallel for schedule(static) reduction(|| : bad)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        bad = !key_of_point(pc.row(i), pc.dims, bb, cfg, scheme, out[i]) || bad;
    if (bad) curve_keys_serial(pc, bb, cfg, scheme, out);  // re-raise with the exact point
}

void pairwise_cost_serial(const PointCloud& X, const PointCloud& Y, GroundMetric metric,
                          std::span<double> out) {
    check_cost_shapes(X, Y, out.size());
    const std::size_t m = Y.size();
    for (std::size_t i = 0; i < X.size(); ++i)
        for (std::size_t j = 0; j < m; ++j)
            out[i * m + j] = point_cost(X.row(i), Y.row(j), X.dims, metric);
}

void pairwise_cost(const PointCloud& X, const PointCloud& Y, GroundMetric metric,
                   std::span<double> out) {
    check_cost_shapes(X, Y, out.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(X.size());
    const std::size_t m = Y.size();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            out[i * m + j] = point_cost(X.row(i), Y.row(j), X.dims, metric);
}

namespace {
void check_nn_shapes(const PointCloud& X, const PointCloud& Y, std::size_t out_size) {
    if (X.dims != Y.dims) throw DomainError("nearest neighbor: dimension mismatch");
    if (Y.size() == 0) throw DomainError("nearest neighbor: empty target cloud");
    if (out_size != X.size()) throw DomainError("nearest neighbor: bad output size");
}
}  // namespace

void nn_min_sqdist_serial(const PointCloud& X, const PointCloud& Y, std::span<double> out) {
    check_nn_shapes(X, Y, out.size());
    for (std::size_t i = 0; i < X.size(); ++i) out[i] = min_sqdist_to(Y, X.row(i), X.dims);
}

void nn_min_sqdist(const PointCloud& X, const PointCloud& Y, std::span<double> out) {
    check_nn_shapes(X, Y, out.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(X.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = min_sqdist_to(Y, X.row(i), X.dims);
}

void self_nn_min_sqdist_serial(const PointCloud& pc, std::span<double> out) {
    if (pc.size() < 2) throw DomainError("self nearest neighbor needs at least 2 points");
    if (out.size() != pc.size()) throw DomainError("self nearest neighbor: bad output size");
    for (std::size_t i = 0; i < pc.size(); ++i) out[i] = self_min_sqdist(pc, i);
}

void self_nn_min_sqdist(const PointCloud& pc, std::span<double> out) {
    if (pc.size() < 2) throw DomainError("self nearest neighbor needs at least 2 points");
    if (out.size() != pc.size()) throw DomainError("self nearest neighbor: bad output size");
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(pc.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = self_min_sqdist(pc, i);
}

void fps_relax_serial(const PointCloud& pc, const double* p, std::span<double> min_sqdist) {
    for (std::size_t i = 0; i < pc.size(); ++i)
        min_sqdist[i] = std::min(min_sqdist[i], sqdist(pc.row(i), p, pc.dims));
}

void fps_relax(const PointCloud& pc, const double* p, std::span<double> min_sqdist) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(pc.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        min_sqdist[i] = std::min(min_sqdist[i], sqdist(pc.row(i), p, pc.dims));
}

void softmin_update_serial(std::span<const double> cost, std::size_t rows, std::size_t cols,
                           bool transposed, double eps, double log_weight,
                           std::span<const double> other, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = eps * log_weight -
                 eps * softmin_row(cost.data(), rows, cols, transposed, i, eps, other.data());
}

void softmin_update(std::span<const double> cost, std::size_t rows, std::size_t cols,
                    bool transposed, double eps, double log_weight,
                    std::span<const double> other, std::span<double> out) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[i] = eps * log_weight -
                 eps * softmin_row(cost.data(), rows, cols, transposed, i, eps, other.data());
}

void scaling_update_serial(std::span<const double> kernel, std::size_t rows, std::size_t cols,
                           bool transposed, double weight, std::span<const double> other,
                           std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = weight / scaling_row(kernel.data(), rows, cols, transposed, i, other.data());
}

void scaling_update(std::span<const double> kernel, std::size_t rows, std::size_t cols,
                    bool transposed, double weight, std::span<const double> other,
                    std::span<double> out) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[i] = weight / scaling_row(kernel.data(), rows, cols, transposed, i, other.data());
}

}  // namespace hcl::kernels
