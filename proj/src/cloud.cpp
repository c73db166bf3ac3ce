#include "hilbertcloud/cloud.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <string>

#include "detail.hpp"
#include "hilbertcloud/error.hpp"
#include "hilbertcloud/kernels.hpp"
#include "hilbertcloud/rng.hpp"

namespace hcl {

bool all_finite(const PointCloud& pc) {
    for (double v : pc.data)
        if (!std::isfinite(v)) return false;
    return true;
}

bool Permutation::is_valid() const {
    std::vector<char> seen(order.size(), 0);
    for (std::size_t v : order) {
        if (v >= order.size() || seen[v]) return false;
        seen[v] = 1;
    }
    return true;
}

BoundingBox bounding_box(const PointCloud& pc) {
    if (pc.size() == 0) throw DomainError("bounding box of an empty cloud");
    if (!all_finite(pc)) throw DomainError("bounding box: cloud has non-finite coordinates");
    BoundingBox bb;
    bb.min.assign(pc.row(0), pc.row(0) + pc.dims);
    bb.max = bb.min;
    for (std::size_t i = 1; i < pc.size(); ++i) {
        const double* p = pc.row(i);
        for (int k = 0; k < pc.dims; ++k) {
            bb.min[k] = std::min(bb.min[k], p[k]);
            bb.max[k] = std::max(bb.max[k], p[k]);
        }
    }
    return bb;
}

std::vector<GridCoordinate> quantize(const PointCloud& pc, const BoundingBox& bb,
                                     const CurveConfig& cfg) {
    if (cfg.dims != pc.dims) throw DomainError("quantize: config dims must match the cloud");
    if (static_cast<int>(bb.min.size()) != pc.dims || static_cast<int>(bb.max.size()) != pc.dims)
        throw DomainError("quantize: bounding box dims must match the cloud");
    const std::uint64_t max_coord = cfg.max_coord();
    std::vector<GridCoordinate> cells(pc.size());
    for (std::size_t i = 0; i < pc.size(); ++i) {
        GridCoordinate& c = cells[i];
        c.coords.resize(pc.dims);
        for (int k = 0; k < pc.dims; ++k)
            if (!detail::quantize_axis(pc.at(i, k), bb.min[k], bb.max[k], max_coord,
                                       c.coords[k]))
                throw DomainError("quantize: point " + std::to_string(i) +
                                  " outside the bounding box");
    }
    return cells;
}

namespace {

// Stable LSD radix sort of the permutation by little-endian key bytes.
Permutation radix_sort_keys(const std::vector<uint128>& keys, int key_bytes) {
    const std::size_t n = keys.size();
    std::vector<std::size_t> perm(n), next(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (int b = 0; b < key_bytes; ++b) {
        std::size_t count[257] = {0};
        const int shift = 8 * b;
        for (std::size_t i = 0; i < n; ++i)
            ++count[static_cast<unsigned>((keys[perm[i]] >> shift) & 0xff) + 1];
        for (int v = 0; v < 256; ++v) count[v + 1] += count[v];
        for (std::size_t i = 0; i < n; ++i)
            next[count[static_cast<unsigned>((keys[perm[i]] >> shift) & 0xff)]++] = perm[i];
        perm.swap(next);
    }
    return Permutation{std::move(perm)};
}

}  // namespace

SortResult hilbert_sort(const PointCloud& pc, const CurveConfig& cfg) {
    if (pc.size() == 0) return {PointCloud(pc.dims), Permutation{}};
    const BoundingBox bb = bounding_box(pc);
    std::vector<uint128> keys(pc.size());
    kernels::curve_keys(pc, bb, cfg, OrderScheme::hilbert, keys);
    Permutation perm = radix_sort_keys(keys, cfg.key_bytes());
    PointCloud sorted = apply_permutation(pc, perm);
    return {std::move(sorted), std::move(perm)};
}

Permutation order_by(const PointCloud& pc, OrderScheme scheme, const CurveConfig& cfg) {
    const std::size_t n = pc.size();
    if (n == 0) return Permutation{};
    if (scheme == OrderScheme::lex) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return std::lexicographical_compare(pc.row(a), pc.row(a) + pc.dims, pc.row(b),
                                                pc.row(b) + pc.dims);
        });
        return Permutation{std::move(idx)};
    }
    const BoundingBox bb = bounding_box(pc);
    std::vector<uint128> keys(n);
    kernels::curve_keys(pc, bb, cfg, scheme, keys);
    return radix_sort_keys(keys, cfg.key_bytes());
}

PointCloud fps_subsample(const PointCloud& pc, std::size_t m, std::uint64_t seed) {
    const std::size_t n = pc.size();
    if (m == 0) throw DomainError("fps: sample size must be positive");
    if (m > n) throw DomainError("fps: sample size " + std::to_string(m) + " exceeds cloud size " +
                                 std::to_string(n));

    Rng rng(seed);
    std::size_t current = uniform_index(rng, n);

    PointCloud out(pc.dims);
    out.data.reserve(m * pc.dims);
    out.push(pc.row(current));

    std::vector<char> taken(n, 0);
    taken[current] = 1;
    std::vector<double> min_sqdist(n, std::numeric_limits<double>::infinity());
    for (std::size_t pick = 1; pick < m; ++pick) {
        kernels::fps_relax(pc, pc.row(current), min_sqdist);
        // deterministic argmax over the remaining points, lowest index wins ties
        std::size_t best = n;
        double best_d = -1.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!taken[i] && min_sqdist[i] > best_d) {
                best_d = min_sqdist[i];
                best = i;
            }
        current = best;
        taken[current] = 1;
        out.push(pc.row(current));
    }
    return out;
}

PointCloud apply_permutation(const PointCloud& pc, const Permutation& perm) {
    if (perm.size() != pc.size() || !perm.is_valid())
        throw DomainError("invalid permutation for this cloud");
    PointCloud out(pc.dims);
    out.data.resize(pc.data.size());
    for (std::size_t k = 0; k < perm.size(); ++k)
        std::memcpy(out.row(k), pc.row(perm.order[k]), sizeof(double) * pc.dims);
    return out;
}

}  // namespace hcl
