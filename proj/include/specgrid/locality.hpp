// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "specgrid/core.hpp"

namespace specgrid {

// What gets resampled after the verifier rejects draft positions.
//
//   RasterScan:  everything from the first rejection to the window end
//                 (standard speculative-decoding behavior).
//   LocalNaive:  exactly the rejected positions, nothing else.
//   LocalExpand: the rejected positions plus their Chebyshev-radius-l 2D
//                 neighborhoods, never reaching before the first rejection.
struct RejectionMode {
    enum class Kind { kRasterScan, kLocalNaive, kLocalExpand };

    Kind kind   = Kind::kLocalExpand;
    int  radius = 0;  // LocalExpand only; LocalNaive is LocalExpand(0)

    static RejectionMode raster_scan();
    static RejectionMode local_naive();
    static RejectionMode local_expand(int radius);

    bool operator==(const RejectionMode &) const = default;
};

// One window's rejection bookkeeping inside a decode trace.
struct WindowRejection {
    int              window_start = 0;  // n
    int              window_len   = 0;  // L
    std::vector<int> rejected;          // R_T, ascending raster indices in [n, n+L)
    std::vector<int> expanded;          // R_X, ascending raster indices in [t0, n+L)
};

// Raster indices u with |i_u - i_t| <= l, |j_u - j_t| <= l and u >= t0,
// intersected with the grid. Sorted ascending.
std::vector<int> neighborhood(int t, int radius, const GridShape & shape, int t0);

// Applies the rejection mode to R_T (non-empty, ascending, inside the window
// [window_start, window_start + window_len)). The result is sorted ascending,
// duplicate-free, starts at t0 = R_T.front() for RasterScan/LocalExpand, and
// never leaves the window. Expansion is single-pass: neighborhoods are taken
// around the original rejections only, not around newly added indices.
std::vector<int> expand_rejections(const std::vector<int> & rejected, const RejectionMode & mode,
                                   const GridShape & shape, int window_start, int window_len);

}  // namespace specgrid
