#include "hilbertcloud/metrics.hpp"

#include <cmath>

#include "hilbertcloud/error.hpp"
#include "hilbertcloud/kernels.hpp"

namespace hcl {

double chamfer(const PointCloud& X, const PointCloud& Y) {
    if (X.size() == 0 || Y.size() == 0) throw DomainError("chamfer: empty cloud");
    if (X.dims != Y.dims) throw DomainError("chamfer: dimension mismatch");

    std::vector<double> dx(X.size()), dy(Y.size());
    kernels::nn_min_sqdist(X, Y, dx);
    kernels::nn_min_sqdist(Y, X, dy);
    double sx = 0.0, sy = 0.0;
    for (double v : dx) sx += v;
    for (double v : dy) sy += v;
    return sx / static_cast<double>(X.size()) + sy / static_cast<double>(Y.size());
}

double emd(const PointCloud& X, const PointCloud& Y, EmdMode mode, const SinkhornParams& p,
           GroundMetric metric) {
    if (X.size() != Y.size()) throw DomainError("emd: clouds must have the same size");
    if (mode == EmdMode::exact) return exact_emd(X, Y, metric);
    return sinkhorn_distance(X, Y, p, metric).transport_cost;
}

double locality_score(const PointCloud& pc, const Permutation& perm) {
    const std::size_t n = pc.size();
    if (n < 2) throw DomainError("locality score needs at least 2 points");
    if (perm.size() != n || !perm.is_valid())
        throw DomainError("locality score: invalid permutation");

    double total = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double* a = pc.row(perm.order[k]);
        const double* b = pc.row(perm.order[k + 1]);
        double s = 0.0;
        for (int c = 0; c < pc.dims; ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
        total += std::sqrt(s);
    }
    return total / static_cast<double>(n - 1);
}

LocalityReport compare_orderings(const PointCloud& pc, const CurveConfig& cfg) {
    if (pc.size() < 2) throw DomainError("compare orderings needs at least 2 points");

    LocalityReport report;
    std::vector<double> nn(pc.size());
    kernels::self_nn_min_sqdist(pc, nn);
    double mean_nn = 0.0;
    for (double v : nn) mean_nn += std::sqrt(v);
    mean_nn /= static_cast<double>(pc.size());
    report.mean_nn_distance = mean_nn;

    const std::pair<const char*, OrderScheme> schemes[] = {
        {"hilbert", OrderScheme::hilbert},
        {"morton", OrderScheme::morton},
        {"lex", OrderScheme::lex},
    };
    for (const auto& [name, scheme] : schemes) {
        const double score = locality_score(pc, order_by(pc, scheme, cfg));
        // mean_nn = 0 only when every point coincides; scores are 0 there too
        report.entries.push_back({name, score, mean_nn > 0 ? score / mean_nn : 0.0});
    }
    return report;
}

}  // namespace hcl
