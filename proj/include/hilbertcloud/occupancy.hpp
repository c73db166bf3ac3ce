#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>

#include "hilbertcloud/cloud.hpp"
#include "hilbertcloud/sinkhorn.hpp"

namespace hcl {

/// One LiDAR frame of a sequence: d = 3 on ingest, d = 2 after projection.
struct Frame {
    PointCloud cloud;
    std::int64_t t = 0;
};

/// Rowwise difference between two cardinality-matched 2-D clouds; same
/// storage layout as the clouds it was built from.
using DiffCloud = PointCloud;

enum class Methodology { p2p, p2d, d2d };

enum class PayloadKind { cloud, diff };

/// One supervised example. The roles follow the methodology:
///   p2p: x_t -> x_{t+1}, p2d: x_t -> delta_{t+1|t},
///   d2d: delta_{t|t-1} -> delta_{t+1|t}.
/// base is x_t (after subsampling and Hilbert sorting), kept so predictions
/// in delta form can be composed back into a cloud.
struct TrainingPair {
    Methodology methodology = Methodology::p2p;
    PayloadKind input_kind = PayloadKind::cloud;
    PayloadKind target_kind = PayloadKind::cloud;
    PointCloud input;
    PointCloud target;
    PointCloud base;
};

/// 2-D boolean raster over [-extent, extent]^2; a cell is occupied iff at
/// least one point fell in it. Row-major by y index.
struct OccupancyGrid {
    std::size_t width = 0, height = 0;
    double cell_size = 0.0;
    std::array<double, 2> origin{0.0, 0.0};
    std::vector<std::uint8_t> cells;

    bool occupied(std::size_t ix, std::size_t iy) const { return cells[iy * width + ix] != 0; }
};

inline constexpr double kDefaultGroundZ = -1.5;
inline constexpr double kDefaultClipRange = 30.0;
inline constexpr double kDefaultCellSize = 0.5;

/// Drops the z column of a 3-D frame.
Frame project_xy(const Frame& f);

/// Keeps points whose z exceeds z_min (height threshold relative to the
/// sensor). May return an empty frame.
Frame remove_ground(const Frame& f, double z_min = kDefaultGroundZ);

/// Ground removal with a caller-supplied point predicate (keep if true);
/// hook for segmenters beyond the height threshold.
Frame remove_ground_if(const Frame& f, const std::function<bool(double, double, double)>& keep);

/// Keeps points inside the closed axis-aligned box |x| <= r, |y| <= r with
/// the ego vehicle at the origin; z (when present) is unconstrained.
Frame clip_range(const Frame& f, double r = kDefaultClipRange);

/// FPS-subsamples both frames to exactly n points with the same seed.
std::pair<Frame, Frame> normalize_cardinality(const Frame& a, const Frame& b, std::size_t n,
                                              std::uint64_t seed);

/// Builds one training pair from 2 (p2p, p2d) or 3 (d2d) consecutive
/// projected frames. Every frame is FPS-subsampled to n points (same seed)
/// and Hilbert-sorted; rowwise correspondence for the differences is by
/// Hilbert rank.
TrainingPair make_pair(std::span<const Frame> frames, Methodology m, std::size_t n,
                       std::uint64_t seed, const CurveConfig& cfg = CurveConfig(2, kDefaultSortOrder));

/// Rowwise sum: turns a predicted difference plus its base cloud back into a
/// cloud.
PointCloud compose_prediction(const DiffCloud& delta, const PointCloud& base);

/// Rasterizes a 2-D cloud onto the grid over [-extent, extent]^2. Points on
/// the max boundary clamp into the last cell; points outside are ignored.
OccupancyGrid rasterize(const PointCloud& pc, double cell_size = kDefaultCellSize,
                        double extent = kDefaultClipRange);

/// (Chamfer, EMD) of a prediction against the ground truth. EMD uses the
/// exact assignment solver up to 64 points and the Sinkhorn transport cost
/// beyond that.
std::pair<double, double> evaluate_prediction(const PointCloud& pred, const PointCloud& truth,
                                              const SinkhornParams& p = SinkhornParams{});

/// P2 ASCII portable graymap, 0 = free, 255 = occupied; rows written from
/// max y down so the image reads like a map.
std::string to_pgm(const OccupancyGrid& g);

/// JSON sidecar describing the raster geometry.
std::string grid_sidecar_json(const OccupancyGrid& g);

const char* methodology_name(Methodology m);

}  // namespace hcl
