#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <cstdlib>
#include <vector>

#include "hilbertcloud/hilbert.hpp"
#include "oracles.hpp"

using namespace hcl;

namespace {

GridCoordinate cell2(std::uint64_t x, std::uint64_t y) {
    return GridCoordinate{{x, y}};
}

std::uint64_t l1_dist(const GridCoordinate& a, const GridCoordinate& b) {
    std::uint64_t d = 0;
    for (std::size_t k = 0; k < a.coords.size(); ++k) {
        const std::uint64_t u = a.coords[k], v = b.coords[k];
        d += u > v ? u - v : v - u;
    }
    return d;
}

// Odometer over the full grid.
bool next_cell(GridCoordinate& c, std::uint64_t cells_per_axis) {
    for (auto& v : c.coords) {
        if (++v < cells_per_axis) return true;
        v = 0;
    }
    return false;
}

}  // namespace

TEST_CASE("hilbert base orientation, d=2 p=1") {
    const CurveConfig cfg(2, 1);
    CHECK(hilbert_encode(cell2(0, 0), cfg).value == 0);
    CHECK(hilbert_encode(cell2(0, 1), cfg).value == 1);
    CHECK(hilbert_encode(cell2(1, 1), cfg).value == 2);
    CHECK(hilbert_encode(cell2(1, 0), cfg).value == 3);
    CHECK(hilbert_decode(HilbertIndex{0}, cfg) == cell2(0, 0));
}

TEST_CASE("order-1 curve matches recursive subdivision oracle") {
    const CurveConfig cfg(2, 1);
    const auto curve = oracle::hilbert_curve_2d(1);
    REQUIRE(curve.size() == 4);
    for (std::uint64_t i = 0; i < 4; ++i) {
        const auto c = hilbert_decode(HilbertIndex{i}, cfg);
        CHECK(c.coords[0] == curve[i].first);
        CHECK(c.coords[1] == curve[i].second);
    }
    // consecutive cells differ by exactly one unit step
    for (std::uint64_t i = 0; i + 1 < 4; ++i) {
        CHECK(l1_dist(hilbert_decode(HilbertIndex{i}, cfg),
                      hilbert_decode(HilbertIndex{i + 1}, cfg)) == 1);
    }
}

TEST_CASE("full visitation order equals oracle for d=2, p in {1,2,3}") {
    for (int p = 1; p <= 3; ++p) {
        const CurveConfig cfg(2, p);
        const auto curve = oracle::hilbert_curve_2d(p);
        const std::uint64_t total = std::uint64_t{1} << (2 * p);
        REQUIRE(curve.size() == total);
        for (std::uint64_t i = 0; i < total; ++i) {
            const auto c = hilbert_decode(HilbertIndex{i}, cfg);
            REQUIRE(c.coords[0] == curve[i].first);
            REQUIRE(c.coords[1] == curve[i].second);
            REQUIRE(hilbert_encode(c, cfg).value == i);
        }
    }
}

TEST_CASE("bijectivity, exhaustive") {
    SUBCASE("d=2, p<=5") {
        for (int p = 1; p <= 5; ++p) {
            const CurveConfig cfg(2, p);
            const std::uint64_t side = std::uint64_t{1} << p;
            std::vector<char> seen(side * side, 0);
            GridCoordinate c{{0, 0}};
            do {
                const auto i = hilbert_encode(c, cfg);
                REQUIRE(i.value < side * side);
                REQUIRE(!seen[static_cast<std::size_t>(i.value)]);
                seen[static_cast<std::size_t>(i.value)] = 1;
                REQUIRE(hilbert_decode(i, cfg) == c);
            } while (next_cell(c, side));
        }
    }
    SUBCASE("d=3, p<=3") {
        for (int p = 1; p <= 3; ++p) {
            const CurveConfig cfg(3, p);
            const std::uint64_t side = std::uint64_t{1} << p;
            const std::uint64_t total = side * side * side;
            std::vector<char> seen(total, 0);
            GridCoordinate c{{0, 0, 0}};
            do {
                const auto i = hilbert_encode(c, cfg);
                REQUIRE(i.value < total);
                REQUIRE(!seen[static_cast<std::size_t>(i.value)]);
                seen[static_cast<std::size_t>(i.value)] = 1;
                REQUIRE(hilbert_decode(i, cfg) == c);
            } while (next_cell(c, side));
        }
    }
}

TEST_CASE("hilbert adjacency: consecutive indices decode to unit-adjacent cells") {
    SUBCASE("d=2, p=2 explicitly (indices 0..14)") {
        const CurveConfig cfg(2, 2);
        for (std::uint64_t i = 0; i < 15; ++i)
            CHECK(l1_dist(hilbert_decode(HilbertIndex{i}, cfg),
                          hilbert_decode(HilbertIndex{i + 1}, cfg)) == 1);
    }
    SUBCASE("d=2 p<=5 and d=3 p<=3, exhaustive") {
        for (int p = 1; p <= 5; ++p) {
            const CurveConfig cfg(2, p);
            const std::uint64_t total = std::uint64_t{1} << (2 * p);
            for (std::uint64_t i = 0; i + 1 < total; ++i)
                REQUIRE(l1_dist(hilbert_decode(HilbertIndex{i}, cfg),
                                hilbert_decode(HilbertIndex{i + 1}, cfg)) == 1);
        }
        for (int p = 1; p <= 3; ++p) {
            const CurveConfig cfg(3, p);
            const std::uint64_t total = std::uint64_t{1} << (3 * p);
            for (std::uint64_t i = 0; i + 1 < total; ++i)
                REQUIRE(l1_dist(hilbert_decode(HilbertIndex{i}, cfg),
                                hilbert_decode(HilbertIndex{i + 1}, cfg)) == 1);
        }
    }
}

TEST_CASE("morton: interleaving definition and round trips") {
    const CurveConfig cfg(2, 1);
    CHECK(morton_encode(cell2(1, 1), cfg).value == 3);
    CHECK(morton_encode(cell2(1, 0), cfg).value == 1);
    CHECK(morton_decode(HilbertIndex{3}, cfg) == cell2(1, 1));
    CHECK(morton_decode(HilbertIndex{0}, cfg) == cell2(0, 0));

    SUBCASE("d=2 p=4 and d=3 p=3 round trips, exhaustive") {
        {
            const CurveConfig c24(2, 4);
            GridCoordinate c{{0, 0}};
            do {
                REQUIRE(morton_decode(morton_encode(c, c24), c24) == c);
            } while (next_cell(c, 16));
        }
        {
            const CurveConfig c33(3, 3);
            GridCoordinate c{{0, 0, 0}};
            do {
                REQUIRE(morton_decode(morton_encode(c, c33), c33) == c);
            } while (next_cell(c, 8));
        }
    }

    SUBCASE("morton breaks unit adjacency somewhere (d=2, p=2)") {
        const CurveConfig c22(2, 2);
        bool violated = false;
        for (std::uint64_t i = 0; i + 1 < 16 && !violated; ++i)
            violated = l1_dist(morton_decode(HilbertIndex{i}, c22),
                               morton_decode(HilbertIndex{i + 1}, c22)) != 1;
        CHECK(violated);
    }
}

TEST_CASE("monotone nesting: order-1 index = first order-2 visit / 4") {
    const CurveConfig coarse(2, 1), fine(2, 2);
    GridCoordinate c{{0, 0}};
    do {
        const std::uint64_t i1 = static_cast<std::uint64_t>(hilbert_encode(c, coarse).value);
        // scan the 2x2 block of fine cells covering c
        uint128 first = ~uint128{0};
        for (std::uint64_t dx = 0; dx < 2; ++dx)
            for (std::uint64_t dy = 0; dy < 2; ++dy) {
                const auto i2 =
                    hilbert_encode(cell2(2 * c.coords[0] + dx, 2 * c.coords[1] + dy), fine);
                if (i2.value < first) first = i2.value;
            }
        REQUIRE(static_cast<std::uint64_t>(first / 4) == i1);
    } while (next_cell(c, 2));
}

TEST_CASE("domain and config errors") {
    const CurveConfig cfg(2, 3);
    CHECK_THROWS_AS(hilbert_encode(cell2(8, 0), cfg), DomainError);   // 8 == 2^3
    CHECK_THROWS_AS(morton_encode(cell2(0, 9), cfg), DomainError);
    CHECK_THROWS_AS(hilbert_decode(HilbertIndex{64}, cfg), DomainError);
    CHECK_THROWS_AS(morton_decode(HilbertIndex{~uint128{0}}, cfg), DomainError);
    CHECK_THROWS_AS(hilbert_encode(GridCoordinate{{1, 2, 3}}, cfg), DomainError);
    CHECK_THROWS_AS(CurveConfig(3, 43), DomainError);   // 129 bits
    CHECK_THROWS_AS(CurveConfig(0, 4), DomainError);
    CHECK_THROWS_AS(CurveConfig(2, 0), DomainError);
    CHECK_NOTHROW(CurveConfig(2, 64));                  // exactly 128 bits
    CHECK_NOTHROW(CurveConfig(3, 21));
}

TEST_CASE("wide configs: round trips at the index-width limit") {
    // d=3, p=21 covers sub-micrometer cells over 30 m; d=2, p=64 fills the
    // whole 128-bit index.
    {
        const CurveConfig cfg(3, 21);
        const std::uint64_t m = cfg.max_coord();
        for (const auto& c : {cell2(0, 0), GridCoordinate{{m, m, m}},
                              GridCoordinate{{123456, 7, m / 2}}}) {
            GridCoordinate q = c;
            if (q.coords.size() == 2) q.coords.push_back(m);
            REQUIRE(hilbert_decode(hilbert_encode(q, cfg), cfg) == q);
            REQUIRE(morton_decode(morton_encode(q, cfg), cfg) == q);
        }
    }
    {
        const CurveConfig cfg(2, 64);
        const GridCoordinate q{{0x0123456789abcdefULL, 0xfedcba9876543210ULL}};
        REQUIRE(hilbert_decode(hilbert_encode(q, cfg), cfg) == q);
        REQUIRE(morton_decode(morton_encode(q, cfg), cfg) == q);
    }
}

TEST_CASE("1-D config degenerates to the identity map") {
    const CurveConfig cfg(1, 5);
    for (std::uint64_t v = 0; v < 32; ++v) {
        CHECK(hilbert_encode(GridCoordinate{{v}}, cfg).value == v);
        CHECK(morton_encode(GridCoordinate{{v}}, cfg).value == v);
    }
}
