// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "specgrid/acceptance.hpp"
#include "specgrid/core.hpp"
#include "specgrid/locality.hpp"
#include "specgrid/models.hpp"

namespace specgrid {

enum class DecoderKind { kBaseline, kSpecDec, kLantern, kMultiScale };

const char * decoder_name(DecoderKind kind);
DecoderKind  decoder_from_name(const std::string & name);

struct DecodeConfig {
    DecoderKind    decoder = DecoderKind::kMultiScale;
    AcceptanceRule rule    = AcceptanceRule::pooled_threshold(1000, 0.1, 1e-4);
    RejectionMode  mode    = RejectionMode::local_expand(3);
    int            resolution_ratio  = 4;  // r = s_p / s_q
    int            draft_window_rows = 1;  // low-res rows drafted per iteration
    std::uint64_t  seed              = 0;
};

// One draft-verify-resample iteration. In the multi-scale decoder every
// window position ends up either accepted (kept draft) or resampled; for the
// raster-scan decoders the positions after the first rejection are discarded
// and re-drafted in the next iteration, so they appear in a later record.
struct IterationRecord {
    WindowRejection      window;  // start, length, rejected and expanded sets
    std::vector<int>     drafted_positions;
    std::vector<VocabId> draft_tokens;
    std::vector<bool>    accepted;      // one decision per examined position
    std::vector<double>  accept_probs;  // coin probabilities (stochastic rules only)
    std::vector<std::pair<int, VocabId>> resampled;
};

struct TraceCounters {
    std::int64_t draft_seq_nfe         = 0;  // sequential drafter forwards
    std::int64_t target_seq_nfe        = 0;  // sequential target forwards (resampling)
    std::int64_t target_parallel_calls = 0;  // batched verification calls
    std::int64_t downsample_calls      = 0;
    std::int64_t upsample_calls        = 0;

    bool operator==(const TraceCounters &) const = default;
};

struct DecodeTrace {
    DecodeConfig                 config;
    std::string                  rng_algorithm = RandomSource::kAlgorithm;
    int                          initial_len   = 0;
    std::vector<IterationRecord> iterations;
    TraceCounters                counters;
    TokenGrid                    final_grid;

    // Tokens generated by this run (grid minus the supplied prefix).
    int generated() const { return final_grid.size() - initial_len; }
};

// Ignores the config echo; compares iterations, counters and the final grid.
bool traces_equivalent(const DecodeTrace & a, const DecodeTrace & b);

std::string trace_to_json(const DecodeTrace & trace);
void        save_trace(const std::string & path, const DecodeTrace & trace);

// ---------------------------------------------------------------------------
// Decoders. Each is a pure function of (models, config, source state): the
// same seed replays the same trace. `initial`, when given, is a prefix of
// already-final tokens the run continues from.
// ---------------------------------------------------------------------------

// Sequential sampling from the target; one sequential NFE per token.
DecodeTrace decode_baseline(const ArModel & target, const Conditioning & cond,
                            StochasticSource & src, const TokenGrid * initial = nullptr);

// Exact speculative decoding: draft a window from q, verify in one parallel
// target call, accept until the first rejection, replace it from the
// residual, discard the rest of the window. Output law equals the target law.
DecodeTrace decode_specdec(const ArModel & target, const ArModel & drafter,
                           const Conditioning & cond, const DecodeConfig & config,
                           StochasticSource & src, const TokenGrid * initial = nullptr);

// As decode_specdec, but acceptance pools the TVD-bounded codebook
// neighborhood of the draft and the rejection residual is taken against the
// relaxed distribution.
DecodeTrace decode_lantern(const ArModel & target, const ArModel & drafter,
                           const Codebook & codebook, const Conditioning & cond,
                           const DecodeConfig & config, StochasticSource & src,
                           const TokenGrid * initial = nullptr);

// Multi-scale decoding: draft full low-res rows, up-sample to a high-res
// window, verify with the deterministic pooled threshold, expand the
// rejections per the configured mode, resample exactly the expanded set
// sequentially from the target, then down-sample the finalized rows as the
// next low-res prefix.
DecodeTrace decode_multiscale(const ArModel & target, const ArModel & drafter,
                              const Upsampler & upsampler, const Downsampler & downsampler,
                              const Codebook & codebook, const Conditioning & cond,
                              const DecodeConfig & config, StochasticSource & src,
                              const TokenGrid * initial = nullptr);

}  // namespace specgrid
