// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#include "specgrid/locality.hpp"

#include <algorithm>

namespace specgrid {

RejectionMode RejectionMode::raster_scan() {
    return RejectionMode{ Kind::kRasterScan, 0 };
}

RejectionMode RejectionMode::local_naive() {
    return RejectionMode{ Kind::kLocalNaive, 0 };
}

RejectionMode RejectionMode::local_expand(int radius) {
    if (radius < 0) {
        throw ParamError("local expansion radius must be >= 0");
    }
    return RejectionMode{ Kind::kLocalExpand, radius };
}

std::vector<int> neighborhood(int t, int radius, const GridShape & shape, int t0) {
    if (radius < 0) {
        throw ParamError("neighborhood radius must be >= 0");
    }
    const Coord center = raster_to_coord(t, shape);
    raster_to_coord(t0, shape);  // bounds check
    if (t < t0) {
        throw ContractError("neighborhood center precedes the first rejection");
    }

    std::vector<int> out;
    const int        row_lo = std::max(0, center.row - radius);
    const int        row_hi = std::min(shape.height - 1, center.row + radius);
    const int        col_lo = std::max(0, center.col - radius);
    const int        col_hi = std::min(shape.width - 1, center.col + radius);
    for (int i = row_lo; i <= row_hi; ++i) {
        for (int j = col_lo; j <= col_hi; ++j) {
            const int u = i * shape.width + j;
            if (u >= t0) {
                out.push_back(u);  // row-major walk keeps this ascending
            }
        }
    }
    return out;
}

std::vector<int> expand_rejections(const std::vector<int> & rejected, const RejectionMode & mode,
                                   const GridShape & shape, int window_start, int window_len) {
    if (rejected.empty()) {
        throw ContractError("expand_rejections requires a non-empty rejection set");
    }
    if (!std::is_sorted(rejected.begin(), rejected.end())) {
        throw ContractError("rejected indices must be sorted ascending");
    }
    const int window_end = window_start + window_len;
    if (rejected.front() < window_start || rejected.back() >= window_end) {
        throw ContractError("rejected indices must lie inside the draft window");
    }
    const int t0 = rejected.front();

    switch (mode.kind) {
        case RejectionMode::Kind::kRasterScan: {
            std::vector<int> out;
            out.reserve(static_cast<size_t>(window_end - t0));
            for (int u = t0; u < window_end; ++u) {
                out.push_back(u);
            }
            return out;
        }
        case RejectionMode::Kind::kLocalNaive:
            return rejected;
        case RejectionMode::Kind::kLocalExpand: {
            std::vector<int> out;
            for (int t : rejected) {
                for (int u : neighborhood(t, mode.radius, shape, t0)) {
                    if (u < window_end) {
                        out.push_back(u);
                    }
                }
            }
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
            return out;
        }
    }
    throw ParamError("unknown rejection mode");
}

}  // namespace specgrid
