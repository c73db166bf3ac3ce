#pragma once

// Independent reference implementations used only by tests. These stay
// deliberately naive (recursion, brute force, scalar loops) so they exercise
// none of the code paths they are checking.

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <utility>
#include <vector>

namespace oracle {

using Cell2 = std::pair<std::uint64_t, std::uint64_t>;

// Recursive quadrant subdivision of the 2-D Hilbert curve. The frame is an
// origin plus two edge vectors; each level splits the square into four
// sub-squares visited first-transposed, straight, straight, last-reflected.
inline void hilbert_subdivide(double x, double y, double xi, double xj, double yi, double yj,
                              int level, std::vector<Cell2>& out) {
    if (level <= 0) {
        const double px = x + (xi + yi) / 2;
        const double py = y + (xj + yj) / 2;
        out.emplace_back(static_cast<std::uint64_t>(std::floor(px)),
                         static_cast<std::uint64_t>(std::floor(py)));
        return;
    }
    hilbert_subdivide(x, y, yi / 2, yj / 2, xi / 2, xj / 2, level - 1, out);
    hilbert_subdivide(x + xi / 2, y + xj / 2, xi / 2, xj / 2, yi / 2, yj / 2, level - 1, out);
    hilbert_subdivide(x + xi / 2 + yi / 2, y + xj / 2 + yj / 2, xi / 2, xj / 2, yi / 2, yj / 2,
                      level - 1, out);
    hilbert_subdivide(x + xi / 2 + yi, y + xj / 2 + yj, -yi / 2, -yj / 2, -xi / 2, -xj / 2,
                      level - 1, out);
}

// Full visitation order of the order-p 2-D Hilbert curve, index 0 first.
// First edge vector points along +y so the order-1 traversal is
// (0,0) -> (0,1) -> (1,1) -> (1,0).
inline std::vector<Cell2> hilbert_curve_2d(int order) {
    std::vector<Cell2> cells;
    cells.reserve(std::size_t{1} << (2 * order));
    const double side = static_cast<double>(std::uint64_t{1} << order);
    hilbert_subdivide(0, 0, 0, side, side, 0, order, cells);
    return cells;
}

// Exact EMD by explicit enumeration of all n! matchings; n <= 9 or so.
// cost is row-major n x n.
inline double emd_brute_force(const std::vector<double>& cost, std::size_t n) {
    std::vector<std::size_t> sigma(n);
    for (std::size_t i = 0; i < n; ++i) sigma[i] = i;
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += cost[i * n + sigma[i]];
        best = std::min(best, total);
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return best / static_cast<double>(n);
}

// Alternating row/column normalization of a positive matrix onto uniform
// marginals (rows 1/n, cols 1/m). Used to fabricate feasible couplings.
inline std::vector<double> project_to_uniform_marginals(std::vector<double> q, std::size_t n,
                                                        std::size_t m, double tol = 1e-13,
                                                        int max_iters = 100000) {
    const double a = 1.0 / static_cast<double>(n), b = 1.0 / static_cast<double>(m);
    for (int it = 0; it < max_iters; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0;
            for (std::size_t j = 0; j < m; ++j) s += q[i * m + j];
            for (std::size_t j = 0; j < m; ++j) q[i * m + j] *= a / s;
        }
        double worst = 0;
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0;
            for (std::size_t i = 0; i < n; ++i) s += q[i * m + j];
            for (std::size_t i = 0; i < n; ++i) q[i * m + j] *= b / s;
            worst = std::max(worst, std::fabs(s - b));
        }
        if (worst <= tol) break;
    }
    return q;
}

}  // namespace oracle
