// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "specgrid/engine.hpp"

namespace specgrid {

// Exact distribution over complete grids, keyed by the raster token tuple.
struct GridDistribution {
    std::map<std::vector<VocabId>, double> prob;

    double total() const;
    double prob_of(const std::vector<VocabId> & grid) const;
};

// Largest absolute difference over the union of supports.
double max_abs_deviation(const GridDistribution & a, const GridDistribution & b);

// Branch budget for exhaustive enumeration; larger instances are refused
// (EnumerationLimitError), never approximated.
inline constexpr std::int64_t kDefaultBranchLimit = 1'000'000;

// Everything needed to run one decoder; the oracle replays it under every
// possible sequence of stochastic outcomes.
struct DecoderSpec {
    DecoderKind         kind = DecoderKind::kBaseline;
    const ArModel *     target  = nullptr;
    const ArModel *     drafter = nullptr;  // SpecDec/Lantern/MultiScale
    const Upsampler *   upsampler   = nullptr;  // MultiScale
    const Downsampler * downsampler = nullptr;  // MultiScale
    const Codebook *    codebook    = nullptr;  // Lantern/MultiScale
    Conditioning        cond;
    DecodeConfig        config;
    const TokenGrid *   initial = nullptr;
};

// Dispatches to the matching decode_* function.
DecodeTrace run_decoder(const DecoderSpec & spec, StochasticSource & src);

// Chain-rule target distribution: P(grid) = prod_t p(x_t | x_<t). Guarded by
// V^N <= limit.
GridDistribution target_law(const ArModel & target, const Conditioning & cond,
                            std::int64_t branch_limit = kDefaultBranchLimit);

// Exact output distribution of a decoder, computed by depth-first enumeration
// of every stochastic branch (draft samples, acceptance coins, residual and
// resampling draws) with probability weights. No Monte Carlo anywhere.
GridDistribution decoder_law(const DecoderSpec & spec,
                             std::int64_t branch_limit = kDefaultBranchLimit);

// Marginal law of the token finally written at `position` when the decoder
// continues from `prefix`. Positions finalize inside their own window, so
// this equals the per-step law of the verification rule at that position.
Categorical per_step_law(const DecoderSpec & spec, const TokenGrid & prefix, int position,
                         std::int64_t branch_limit = kDefaultBranchLimit);

}  // namespace specgrid
