#include "hilbertcloud/occupancy.hpp"

#include <cmath>
#include <sstream>

#include "hilbertcloud/error.hpp"
#include "hilbertcloud/metrics.hpp"
#include "hilbertcloud/xyz_io.hpp"

namespace hcl {

Frame project_xy(const Frame& f) {
    if (f.cloud.dims != 3) throw DomainError("project: frame must be 3-D");
    Frame out{PointCloud(2), f.t};
    out.cloud.data.reserve(f.cloud.size() * 2);
    for (std::size_t i = 0; i < f.cloud.size(); ++i) {
        out.cloud.data.push_back(f.cloud.at(i, 0));
        out.cloud.data.push_back(f.cloud.at(i, 1));
    }
    return out;
}

Frame remove_ground_if(const Frame& f,
                       const std::function<bool(double, double, double)>& keep) {
    if (f.cloud.dims != 3) throw DomainError("ground removal: frame must be 3-D");
    Frame out{PointCloud(3), f.t};
    for (std::size_t i = 0; i < f.cloud.size(); ++i) {
        const double* p = f.cloud.row(i);
        if (keep(p[0], p[1], p[2])) out.cloud.push(p);
    }
    return out;
}

Frame remove_ground(const Frame& f, double z_min) {
    return remove_ground_if(f, [z_min](double, double, double z) { return z > z_min; });
}

Frame clip_range(const Frame& f, double r) {
    if (!(r > 0)) throw DomainError("clip: range must be positive");
    if (f.cloud.dims != 2 && f.cloud.dims != 3) throw DomainError("clip: frame must be 2-D or 3-D");
    Frame out{PointCloud(f.cloud.dims), f.t};
    for (std::size_t i = 0; i < f.cloud.size(); ++i) {
        const double* p = f.cloud.row(i);
        if (std::fabs(p[0]) <= r && std::fabs(p[1]) <= r) out.cloud.push(p);
    }
    return out;
}

std::pair<Frame, Frame> normalize_cardinality(const Frame& a, const Frame& b, std::size_t n,
                                              std::uint64_t seed) {
    if (n == 0) throw DomainError("normalize: target size must be positive");
    if (a.cloud.size() < n || b.cloud.size() < n)
        throw DomainError("normalize: a frame has fewer than " + std::to_string(n) + " points");
    return {Frame{fps_subsample(a.cloud, n, seed), a.t},
            Frame{fps_subsample(b.cloud, n, seed), b.t}};
}

namespace {

PointCloud subsample_and_sort(const PointCloud& pc, std::size_t n, std::uint64_t seed,
                              const CurveConfig& cfg) {
    return hilbert_sort(fps_subsample(pc, n, seed), cfg).cloud;
}

DiffCloud rowwise_diff(const PointCloud& to, const PointCloud& from) {
    DiffCloud d(to.dims);
    d.data.resize(to.data.size());
    for (std::size_t i = 0; i < to.data.size(); ++i) d.data[i] = to.data[i] - from.data[i];
    return d;
}

}  // namespace

TrainingPair make_pair(std::span<const Frame> frames, Methodology m, std::size_t n,
                       std::uint64_t seed, const CurveConfig& cfg) {
    const std::size_t want = m == Methodology::d2d ? 3 : 2;
    if (frames.size() != want)
        throw DomainError(std::string(methodology_name(m)) + " needs " + std::to_string(want) +
                          " consecutive frames, got " + std::to_string(frames.size()));
    for (std::size_t i = 0; i + 1 < frames.size(); ++i)
        if (frames[i].t >= frames[i + 1].t)
            throw DomainError("frame timestamps must be strictly increasing");
    for (const Frame& f : frames) {
        if (f.cloud.dims != 2)
            throw DomainError("pair construction expects projected (2-D) frames");
        if (f.cloud.size() < n)
            throw DomainError("frame " + std::to_string(f.t) + " has " +
                              std::to_string(f.cloud.size()) + " points, need " +
                              std::to_string(n));
    }
    if (n == 0) throw DomainError("pair construction: n must be positive");

    std::vector<PointCloud> sorted;
    sorted.reserve(frames.size());
    for (const Frame& f : frames) sorted.push_back(subsample_and_sort(f.cloud, n, seed, cfg));

    TrainingPair pair;
    pair.methodology = m;
    switch (m) {
        case Methodology::p2p:
            pair.input_kind = PayloadKind::cloud;
            pair.target_kind = PayloadKind::cloud;
            pair.input = sorted[0];
            pair.target = sorted[1];
            pair.base = std::move(sorted[0]);
            break;
        case Methodology::p2d:
            pair.input_kind = PayloadKind::cloud;
            pair.target_kind = PayloadKind::diff;
            pair.input = sorted[0];
            pair.target = rowwise_diff(sorted[1], sorted[0]);
            pair.base = std::move(sorted[0]);
            break;
        case Methodology::d2d:
            pair.input_kind = PayloadKind::diff;
            pair.target_kind = PayloadKind::diff;
            pair.input = rowwise_diff(sorted[1], sorted[0]);
            pair.target = rowwise_diff(sorted[2], sorted[1]);
            pair.base = std::move(sorted[1]);
            break;
    }
    return pair;
}

PointCloud compose_prediction(const DiffCloud& delta, const PointCloud& base) {
    if (delta.dims != base.dims || delta.size() != base.size())
        throw DomainError("compose: delta and base shapes differ");
    PointCloud out = base;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += delta.data[i];
    return out;
}

OccupancyGrid rasterize(const PointCloud& pc, double cell_size, double extent) {
    if (pc.dims != 2) throw DomainError("rasterize: cloud must be 2-D");
    if (!(cell_size > 0)) throw DomainError("rasterize: cell size must be positive");
    if (!(extent > 0)) throw DomainError("rasterize: extent must be positive");

    OccupancyGrid g;
    g.cell_size = cell_size;
    g.origin = {-extent, -extent};
    const std::size_t side =
        static_cast<std::size_t>(std::max(1.0, std::ceil(2.0 * extent / cell_size - 1e-9)));
    g.width = g.height = side;
    g.cells.assign(side * side, 0);

    for (std::size_t i = 0; i < pc.size(); ++i) {
        const double x = pc.at(i, 0), y = pc.at(i, 1);
        if (!(std::fabs(x) <= extent && std::fabs(y) <= extent)) continue;
        auto index = [&](double v) {
            const auto raw = static_cast<long long>(std::floor((v + extent) / cell_size));
            return static_cast<std::size_t>(
                std::min<long long>(std::max<long long>(raw, 0), side - 1));
        };
        g.cells[index(y) * side + index(x)] = 1;
    }
    return g;
}

std::pair<double, double> evaluate_prediction(const PointCloud& pred, const PointCloud& truth,
                                              const SinkhornParams& p) {
    if (pred.size() == 0 || truth.size() == 0)
        throw DomainError("evaluate: clouds must be non-empty");
    const double cd = chamfer(pred, truth);
    const EmdMode mode = pred.size() <= 64 ? EmdMode::exact : EmdMode::sinkhorn;
    const double wd = emd(pred, truth, mode, p);
    return {cd, wd};
}

std::string to_pgm(const OccupancyGrid& g) {
    std::ostringstream out;
    out << "P2\n" << g.width << ' ' << g.height << "\n255\n";
    for (std::size_t row = g.height; row-- > 0;) {
        for (std::size_t ix = 0; ix < g.width; ++ix) {
            if (ix) out << ' ';
            out << (g.occupied(ix, row) ? 255 : 0);
        }
        out << '\n';
    }
    return out.str();
}

std::string grid_sidecar_json(const OccupancyGrid& g) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"cell_size\": " << format_double(g.cell_size) << ",\n";
    out << "  \"extent\": " << format_double(-g.origin[0]) << ",\n";
    out << "  \"origin\": [" << format_double(g.origin[0]) << ", " << format_double(g.origin[1])
        << "],\n";
    out << "  \"width\": " << g.width << ",\n";
    out << "  \"height\": " << g.height << "\n";
    out << "}\n";
    return out.str();
}

const char* methodology_name(Methodology m) {
    switch (m) {
        case Methodology::p2p: return "P2P";
        case Methodology::p2d: return "P2D";
        case Methodology::d2d: return "D2D";
    }
    return "?";
}

}  // namespace hcl
