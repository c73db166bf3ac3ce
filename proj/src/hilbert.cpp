#include "hilbertcloud/hilbert.hpp"

#include <string>

#include "detail.hpp"

namespace hcl {

CurveConfig::CurveConfig(int dims_, int order_) : dims(dims_), order(order_) {
    if (dims < 1) throw DomainError("curve config: dims must be >= 1");
    if (order < 1) throw DomainError("curve config: order must be >= 1");
    if (order > 64) throw DomainError("curve config: order must be <= 64 (coordinate width)");
    if (dims * order > 128)
        throw DomainError("curve config: dims*order = " + std::to_string(dims * order) +
                          " exceeds the 128-bit index");
}

std::uint64_t CurveConfig::max_coord() const {
    return order >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << order) - 1;
}

uint128 CurveConfig::index_count() const {
    const int bits = key_bits();
    return bits >= 128 ? uint128{0} : uint128{1} << bits;
}

namespace {

void check_coord(const GridCoordinate& c, const CurveConfig& cfg) {
    if (static_cast<int>(c.coords.size()) != cfg.dims)
        throw DomainError("grid coordinate has " + std::to_string(c.coords.size()) +
                          " components, config expects " + std::to_string(cfg.dims));
    const std::uint64_t max = cfg.max_coord();
    for (std::uint64_t v : c.coords)
        if (v > max)
            throw DomainError("grid coordinate component " + std::to_string(v) +
                              " out of range for order " + std::to_string(cfg.order));
}

void check_index(HilbertIndex i, const CurveConfig& cfg) {
    const uint128 count = cfg.index_count();
    if (count != 0 && i.value >= count) throw DomainError("curve index out of range");
}

}  // namespace

HilbertIndex hilbert_encode(const GridCoordinate& c, const CurveConfig& cfg) {
    check_coord(c, cfg);
    return HilbertIndex{detail::hilbert_key(c.coords.data(), cfg.dims, cfg.order)};
}

GridCoordinate hilbert_decode(HilbertIndex i, const CurveConfig& cfg) {
    check_index(i, cfg);
    GridCoordinate c{std::vector<std::uint64_t>(cfg.dims, 0)};
    detail::hilbert_unkey(i.value, cfg.dims, cfg.order, c.coords.data());
    return c;
}

HilbertIndex morton_encode(const GridCoordinate& c, const CurveConfig& cfg) {
    check_coord(c, cfg);
    return HilbertIndex{detail::morton_key(c.coords.data(), cfg.dims, cfg.order)};
}

GridCoordinate morton_decode(HilbertIndex i, const CurveConfig& cfg) {
    check_index(i, cfg);
    GridCoordinate c{std::vector<std::uint64_t>(cfg.dims, 0)};
    detail::morton_unkey(i.value, cfg.dims, cfg.order, c.coords.data());
    return c;
}

}  // namespace hcl
