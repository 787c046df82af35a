// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <vector>

#include "doctest.h"
#include "specgrid/locality.hpp"

using namespace specgrid;

namespace {

// Independent brute force: scan every grid cell and test the definition
// directly, without reusing neighborhood().
std::vector<int> brute_force_expand(const std::vector<int> & rejected, int radius,
                                    const GridShape & shape, int window_start, int window_len) {
    const int        t0 = rejected.front();
    std::vector<int> out;
    for (int u = 0; u < shape.cells(); ++u) {
        if (u < t0 || u >= window_start + window_len) {
            continue;
        }
        const int iu = u / shape.width;
        const int ju = u % shape.width;
        for (int t : rejected) {
            const int it = t / shape.width;
            const int jt = t % shape.width;
            if (std::abs(iu - it) <= radius && std::abs(ju - jt) <= radius) {
                out.push_back(u);
                break;
            }
        }
    }
    return out;
}

}  // namespace

TEST_CASE("neighborhood of a raster index") {
    // 4x4 grid, t=5 at (1,1), radius 1, t0=5.
    CHECK(neighborhood(5, 1, GridShape{ 4, 4 }, 5) == std::vector<int>{ 5, 6, 8, 9, 10 });

    // Zero radius is the point itself.
    CHECK(neighborhood(7, 0, GridShape{ 4, 4 }, 3) == std::vector<int>{ 7 });

    // A radius covering the whole grid keeps every index >= t0.
    {
        const std::vector<int> got = neighborhood(6, 4, GridShape{ 3, 4 }, 4);
        std::vector<int>       want;
        for (int u = 4; u < 12; ++u) {
            want.push_back(u);
        }
        CHECK(got == want);
    }

    CHECK_THROWS_AS(neighborhood(3, 1, GridShape{ 4, 4 }, 5), ContractError);
    CHECK_THROWS_AS(neighborhood(99, 1, GridShape{ 4, 4 }, 0), IndexError);
}

TEST_CASE("expand_rejections by mode") {
    const GridShape shape{ 4, 4 };

    // Raster scan keeps the suffix from the first rejection.
    CHECK(expand_rejections({ 7 }, RejectionMode::raster_scan(), shape, 4, 8) ==
          std::vector<int>{ 7, 8, 9, 10, 11 });

    // Naive keeps exactly the rejected set.
    CHECK(expand_rejections({ 5, 7 }, RejectionMode::local_naive(), shape, 4, 8) ==
          std::vector<int>{ 5, 7 });

    // Radius 0 expansion equals naive.
    CHECK(expand_rejections({ 5, 7 }, RejectionMode::local_expand(0), shape, 4, 8) ==
          expand_rejections({ 5, 7 }, RejectionMode::local_naive(), shape, 4, 8));

    CHECK_THROWS_AS(expand_rejections({}, RejectionMode::local_naive(), shape, 4, 8),
                    ContractError);
    CHECK_THROWS_AS(expand_rejections({ 3 }, RejectionMode::local_naive(), shape, 4, 8),
                    ContractError);
    CHECK_THROWS_AS(expand_rejections({ 7, 5 }, RejectionMode::local_naive(), shape, 4, 8),
                    ContractError);
}

TEST_CASE("radius-1 expansion around scattered rejections") {
    // 4x6 grid with rejections at (1,2) and (2,3): the expansion covers both
    // 3x3 neighborhoods, clipped to indices at or past the first rejection.
    const GridShape        shape{ 4, 6 };
    const std::vector<int> rejected{ 8, 15 };
    const std::vector<int> expanded =
        expand_rejections(rejected, RejectionMode::local_expand(1), shape, 0, 24);

    CHECK(expanded == std::vector<int>{ 8, 9, 10, 13, 14, 15, 16, 20, 21, 22 });

    // Strictly contains the rejected set and nothing before t0.
    for (int t : rejected) {
        CHECK(std::find(expanded.begin(), expanded.end(), t) != expanded.end());
    }
    CHECK(expanded.size() > rejected.size());
    CHECK(expanded.front() == rejected.front());
}

TEST_CASE("expansion matches the brute force on small grids") {
    for (int h = 1; h <= 5; ++h) {
        for (int w = 1; w <= 5; ++w) {
            const GridShape shape{ h, w };
            const int       cells = shape.cells();
            for (int a = 0; a < cells; ++a) {
                for (int b = a; b < cells; ++b) {
                    std::vector<int> rejected{ a };
                    if (b != a) {
                        rejected.push_back(b);
                    }
                    for (int radius = 0; radius <= 3; ++radius) {
                        const auto got = expand_rejections(
                            rejected, RejectionMode::local_expand(radius), shape, 0, cells);
                        const auto want = brute_force_expand(rejected, radius, shape, 0, cells);
                        REQUIRE(got == want);
                    }
                }
            }
        }
    }
}

TEST_CASE("expansion clamps to the draft window") {
    // Window [4, 8) on a 4x4 grid: the radius-2 neighborhood of 6 reaches
    // past the window and must be cut off.
    const GridShape  shape{ 4, 4 };
    const auto       got = expand_rejections({ 6 }, RejectionMode::local_expand(2), shape, 4, 4);
    for (int u : got) {
        CHECK(u >= 6);
        CHECK(u < 8);
    }
    CHECK(got == brute_force_expand({ 6 }, 2, shape, 4, 4));
}

TEST_CASE("modes nest monotonically") {
    RandomSource rng(77);
    auto is_subset = [](const std::vector<int> & small, const std::vector<int> & big) {
        return std::includes(big.begin(), big.end(), small.begin(), small.end());
    };

    for (int trial = 0; trial < 500; ++trial) {
        const int       h = 1 + static_cast<int>(rng.next_u64() % 6);
        const int       w = 1 + static_cast<int>(rng.next_u64() % 6);
        const GridShape shape{ h, w };
        const int       cells = shape.cells();

        std::vector<int> rejected;
        const int        count = 1 + static_cast<int>(rng.next_u64() % 3);
        for (int i = 0; i < count; ++i) {
            rejected.push_back(static_cast<int>(rng.next_u64() % cells));
        }
        std::sort(rejected.begin(), rejected.end());
        rejected.erase(std::unique(rejected.begin(), rejected.end()), rejected.end());

        const auto naive = expand_rejections(rejected, RejectionMode::local_naive(), shape, 0,
                                             cells);
        const auto raster =
            expand_rejections(rejected, RejectionMode::raster_scan(), shape, 0, cells);
        std::vector<std::vector<int>> expansions;
        for (int radius = 0; radius <= 6; ++radius) {
            expansions.push_back(
                expand_rejections(rejected, RejectionMode::local_expand(radius), shape, 0, cells));
        }

        REQUIRE(is_subset(naive, expansions[0]));
        for (size_t i = 1; i < expansions.size(); ++i) {
            REQUIRE(is_subset(expansions[i - 1], expansions[i]));
        }
        REQUIRE(is_subset(expansions.back(), raster));

        // A radius covering the grid reproduces raster scan exactly.
        REQUIRE(expand_rejections(rejected, RejectionMode::local_expand(std::max(h, w)), shape, 0,
                                  cells) == raster);

        // The first rejection is always the minimum, outputs are sorted and
        // unique, and raster/naive expansion is idempotent.
        for (const auto & set : { naive, raster, expansions[3] }) {
            REQUIRE(set.front() == rejected.front());
            REQUIRE(std::is_sorted(set.begin(), set.end()));
            REQUIRE(std::adjacent_find(set.begin(), set.end()) == set.end());
        }
        REQUIRE(expand_rejections(naive, RejectionMode::local_naive(), shape, 0, cells) == naive);
        REQUIRE(expand_rejections(raster, RejectionMode::raster_scan(), shape, 0, cells) ==
                raster);
    }
}
