// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#include "specgrid/engine.hpp"

#include <algorithm>
#include <fstream>

#include "json_detail.hpp"

namespace specgrid {

const char * decoder_name(DecoderKind kind) {
    switch (kind) {
        case DecoderKind::kBaseline: return "baseline";
        case DecoderKind::kSpecDec:  return "specdec";
        case DecoderKind::kLantern:  return "lantern";
        case DecoderKind::kMultiScale:   return "multiscale";
    }
    return "unknown";
}

DecoderKind decoder_from_name(const std::string & name) {
    if (name == "baseline") return DecoderKind::kBaseline;
    if (name == "specdec")  return DecoderKind::kSpecDec;
    if (name == "lantern")  return DecoderKind::kLantern;
    if (name == "multiscale")   return DecoderKind::kMultiScale;
    throw ConfigError("unknown decoder '" + name + "'");
}

bool traces_equivalent(const DecodeTrace & a, const DecodeTrace & b) {
    if (a.initial_len != b.initial_len || !(a.counters == b.counters) ||
        !(a.final_grid == b.final_grid) || a.iterations.size() != b.iterations.size()) {
        return false;
    }
    for (size_t i = 0; i < a.iterations.size(); ++i) {
        const IterationRecord & x = a.iterations[i];
        const IterationRecord & y = b.iterations[i];
        if (x.window.window_start != y.window.window_start ||
            x.window.window_len != y.window.window_len ||
            x.drafted_positions != y.drafted_positions || x.draft_tokens != y.draft_tokens ||
            x.accepted != y.accepted || x.accept_probs != y.accept_probs ||
            x.window.rejected != y.window.rejected || x.window.expanded != y.window.expanded ||
            x.resampled != y.resampled) {
            return false;
        }
    }
    return true;
}

namespace detail {

using nlohmann::json;

json rule_to_json(const AcceptanceRule & rule) {
    const char * kind = rule.kind == AcceptanceRule::Kind::kExact         ? "exact"
                        : rule.kind == AcceptanceRule::Kind::kPooledRatio ? "pooled_ratio"
                                                                          : "pooled_threshold";
    return json{ { "kind", kind }, { "k", rule.k }, { "delta", rule.delta }, { "tau", rule.tau } };
}

json mode_to_json(const RejectionMode & mode) {
    const char * kind = mode.kind == RejectionMode::Kind::kRasterScan   ? "raster_scan"
                        : mode.kind == RejectionMode::Kind::kLocalNaive ? "local_naive"
                                                                        : "local_expand";
    return json{ { "kind", kind }, { "radius", mode.radius } };
}

json config_to_json(const DecodeConfig & config) {
    return json{ { "decoder", decoder_name(config.decoder) },
                 { "rule", rule_to_json(config.rule) },
                 { "mode", mode_to_json(config.mode) },
                 { "r", config.resolution_ratio },
                 { "draft_window_rows", config.draft_window_rows },
                 { "seed", config.seed } };
}

}  // namespace detail

namespace {
using nlohmann::json;
using detail::config_to_json;
}  // namespace

std::string trace_to_json(const DecodeTrace & trace) {
    json iterations = json::array();
    for (const IterationRecord & it : trace.iterations) {
        json resampled = json::array();
        for (const auto & [pos, tok] : it.resampled) {
            resampled.push_back(json::array({ pos, tok }));
        }
        iterations.push_back(json{ { "window_start", it.window.window_start },
                                   { "window_len", it.window.window_len },
                                   { "drafted", it.drafted_positions },
                                   { "draft_tokens", it.draft_tokens },
                                   { "accepted", it.accepted },
                                   { "accept_probs", it.accept_probs },
                                   { "rejected", it.window.rejected },
                                   { "expanded", it.window.expanded },
                                   { "resampled", resampled } });
    }
    const json doc{ { "config", config_to_json(trace.config) },
                    { "rng_algorithm", trace.rng_algorithm },
                    { "initial_len", trace.initial_len },
                    { "iterations", iterations },
                    { "counters",
                      json{ { "draft_seq_nfe", trace.counters.draft_seq_nfe },
                            { "target_seq_nfe", trace.counters.target_seq_nfe },
                            { "target_parallel_calls", trace.counters.target_parallel_calls },
                            { "downsample_calls", trace.counters.downsample_calls },
                            { "upsample_calls", trace.counters.upsample_calls } } },
                    { "final_grid",
                      json{ { "height", trace.final_grid.shape.height },
                            { "width", trace.final_grid.shape.width },
                            { "tokens", trace.final_grid.tokens } } } };
    return doc.dump(2);
}

void save_trace(const std::string & path, const DecodeTrace & trace) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    out << trace_to_json(trace) << "\n";
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

namespace {

TokenGrid start_grid(const ArModel & model, const TokenGrid * initial) {
    if (initial == nullptr) {
        return TokenGrid(model.grid_shape());
    }
    if (!(initial->shape == model.grid_shape())) {
        throw ConfigError("initial prefix shape does not match the target shape");
    }
    return *initial;
}

void check_shared_resolution(const ArModel & target, const ArModel & drafter,
                             const DecodeConfig & config) {
    if (config.resolution_ratio != 1) {
        throw ConfigError("this decoder requires r = 1");
    }
    if (!(target.grid_shape() == drafter.grid_shape())) {
        throw ConfigError("target and drafter must share a grid shape when r = 1");
    }
    if (target.vocab_size() != drafter.vocab_size()) {
        throw ConfigError("target and drafter must share a vocabulary");
    }
    if (config.draft_window_rows < 1) {
        throw ConfigError("draft_window_rows must be >= 1");
    }
}

}  // namespace

DecodeTrace decode_baseline(const ArModel & target, const Conditioning & cond,
                            StochasticSource & src, const TokenGrid * initial) {
    DecodeTrace trace;
    trace.config.decoder = DecoderKind::kBaseline;
    TokenGrid grid       = start_grid(target, initial);
    trace.initial_len    = grid.size();

    while (!grid.complete()) {
        const Categorical p = target.evaluate(cond, grid, grid.size());
        grid.push(src.draw_categorical(p));
        ++trace.counters.target_seq_nfe;
    }
    trace.final_grid = std::move(grid);
    return trace;
}

namespace {

// Shared raster-scan window loop for the two r = 1 decoders. The verify
// callback returns the acceptance probability for one examined position; the
// residual callback produces the replacement distribution after a rejection.
template <typename VerifyFn, typename ResidualFn>
DecodeTrace decode_windowed(const ArModel & target, const ArModel & drafter,
                            const Conditioning & cond, const DecodeConfig & config,
                            StochasticSource & src, const TokenGrid * initial, VerifyFn verify,
                            ResidualFn residual) {
    DecodeTrace trace;
    trace.config = config;

    const GridShape shape = target.grid_shape();
    TokenGrid       grid  = start_grid(target, initial);
    trace.initial_len     = grid.size();
    const int window_cap  = config.draft_window_rows * shape.width;

    while (!grid.complete()) {
        const int n = grid.size();
        const int L = std::min(window_cap, shape.cells() - n);

        IterationRecord rec;
        rec.window.window_start = n;
        rec.window.window_len   = L;

        // Draft L tokens sequentially from q.
        TokenGrid                draft_ctx = grid;
        std::vector<Categorical> q_dists;
        q_dists.reserve(static_cast<size_t>(L));
        for (int t = 0; t < L; ++t) {
            Categorical q = drafter.evaluate(cond, draft_ctx, n + t);
            const VocabId tok = src.draw_categorical(q);
            draft_ctx.push(tok);
            q_dists.push_back(std::move(q));
            rec.drafted_positions.push_back(n + t);
            rec.draft_tokens.push_back(tok);
            ++trace.counters.draft_seq_nfe;
        }

        // One parallel verification call covering the whole window; each
        // position's distribution conditions on the draft prefix before it.
        ++trace.counters.target_parallel_calls;
        std::vector<Categorical> p_dists;
        p_dists.reserve(static_cast<size_t>(L));
        for (int t = 0; t < L; ++t) {
            p_dists.push_back(target.evaluate(cond, draft_ctx, n + t));
        }

        // Accept until the first rejection.
        for (int t = 0; t < L; ++t) {
            const VocabId draft = rec.draft_tokens[static_cast<size_t>(t)];
            const double  alpha =
                verify(p_dists[static_cast<size_t>(t)], q_dists[static_cast<size_t>(t)], draft);
            rec.accept_probs.push_back(alpha);
            if (src.draw_bernoulli(alpha)) {
                rec.accepted.push_back(true);
                grid.push(draft);
                continue;
            }
            rec.accepted.push_back(false);
            rec.window.rejected.push_back(n + t);
            rec.window.expanded =
                expand_rejections(rec.window.rejected, RejectionMode::raster_scan(), shape, n, L);
            const Categorical res =
                residual(p_dists[static_cast<size_t>(t)], q_dists[static_cast<size_t>(t)], draft);
            const VocabId replacement = src.draw_categorical(res);
            grid.push(replacement);
            rec.resampled.emplace_back(n + t, replacement);
            break;  // the rest of the window is discarded and re-drafted
        }
        trace.iterations.push_back(std::move(rec));
    }
    trace.final_grid = std::move(grid);
    return trace;
}

}  // namespace

DecodeTrace decode_specdec(const ArModel & target, const ArModel & drafter,
                           const Conditioning & cond, const DecodeConfig & config,
                           StochasticSource & src, const TokenGrid * initial) {
    check_shared_resolution(target, drafter, config);
    return decode_windowed(
        target, drafter, cond, config, src, initial,
        [](const Categorical & p, const Categorical & q, VocabId draft) {
            return exact_accept_prob(p, q, draft);
        },
        [](const Categorical & p, const Categorical & q, VocabId /*draft*/) {
            return residual_distribution(p, q);
        });
}

DecodeTrace decode_lantern(const ArModel & target, const ArModel & drafter,
                           const Codebook & codebook, const Conditioning & cond,
                           const DecodeConfig & config, StochasticSource & src,
                           const TokenGrid * initial) {
    check_shared_resolution(target, drafter, config);
    if (codebook.size() != target.vocab_size()) {
        throw ConfigError("codebook vocabulary does not match the models");
    }
    if (config.rule.kind != AcceptanceRule::Kind::kPooledRatio) {
        throw ConfigError("this decoder uses the pooled ratio rule");
    }
    const int    k     = config.rule.k;
    const double delta = config.rule.delta;
    config.rule.validate(target.vocab_size());

    return decode_windowed(
        target, drafter, cond, config, src, initial,
        [&](const Categorical & p, const Categorical & q, VocabId draft) {
            const NeighborhoodMass nbhd = build_bounded_neighborhood(p, draft, codebook, k, delta);
            return pooled_ratio_accept_prob(q, draft, nbhd);
        },
        [&](const Categorical & p, const Categorical & q, VocabId draft) {
            const NeighborhoodMass nbhd = build_bounded_neighborhood(p, draft, codebook, k, delta);
            return residual_distribution(relaxed_distribution(p, nbhd), q);
        });
}

DecodeTrace decode_multiscale(const ArModel & target, const ArModel & drafter,
                              const Upsampler & upsampler, const Downsampler & downsampler,
                              const Codebook & codebook, const Conditioning & cond,
                              const DecodeConfig & config, StochasticSource & src,
                              const TokenGrid * initial) {
    const GridShape shape = target.grid_shape();
    const int       r     = config.resolution_ratio;
    if (r < 2) {
        throw ConfigError("multi-scale decoding requires r >= 2");
    }
    if (shape.height % r != 0 || shape.width % r != 0) {
        throw ConfigError("target shape must be divisible by r");
    }
    const GridShape low_shape{ shape.height / r, shape.width / r };
    if (!(drafter.grid_shape() == low_shape)) {
        throw ConfigError("drafter shape must be the target shape divided by r");
    }
    if (drafter.vocab_size() != target.vocab_size()) {
        throw ConfigError("target and drafter must share a vocabulary");
    }
    if (upsampler.factor() != r || downsampler.factor() != r) {
        throw ConfigError("sampler factors must equal r");
    }
    if (codebook.size() != target.vocab_size()) {
        throw ConfigError("codebook vocabulary does not match the models");
    }
    if (config.draft_window_rows < 1) {
        throw ConfigError("draft_window_rows must be >= 1");
    }
    if (config.rule.kind != AcceptanceRule::Kind::kPooledThreshold) {
        throw ConfigError("multi-scale decoding uses the pooled threshold rule");
    }
    config.rule.validate(target.vocab_size());

    DecodeTrace trace;
    trace.config = config;

    TokenGrid grid    = start_grid(target, initial);
    trace.initial_len = grid.size();
    if (grid.size() % (r * shape.width) != 0) {
        throw ConfigError("initial prefix must cover complete groups of r high-res rows");
    }

    const double tau = config.rule.tau;
    TokenGrid    low_prefix(low_shape);

    while (!grid.complete()) {
        // Down-sample finalized rows not yet reflected in the low-res prefix.
        const int high_rows_final = grid.size() / shape.width;
        const int low_rows_known  = low_prefix.size() / low_shape.width;
        if (high_rows_final / r > low_rows_known) {
            const auto begin = grid.tokens.begin() +
                               static_cast<std::ptrdiff_t>(low_rows_known * r * shape.width);
            std::vector<VocabId> fresh(begin, grid.tokens.end());
            for (VocabId tok : down_sample(downsampler, fresh, shape.width)) {
                low_prefix.push(tok);
            }
            ++trace.counters.downsample_calls;
        }

        // Draft full low-res rows sequentially.
        const int low_rows_left = low_shape.height - low_prefix.size() / low_shape.width;
        const int rows          = std::min(config.draft_window_rows, low_rows_left);
        TokenGrid low_ctx       = low_prefix;
        std::vector<VocabId> low_draft;
        low_draft.reserve(static_cast<size_t>(rows) * low_shape.width);
        for (int t = 0; t < rows * low_shape.width; ++t) {
            const int         pos = low_ctx.size();
            const Categorical q   = drafter.evaluate(cond, low_ctx, pos);
            const VocabId     tok = src.draw_categorical(q);
            low_ctx.push(tok);
            low_draft.push_back(tok);
            ++trace.counters.draft_seq_nfe;
        }

        // Up-sample the drafted rows into the high-res window.
        const std::vector<VocabId> window = up_sample(upsampler, low_draft, low_shape.width, grid);
        ++trace.counters.upsample_calls;

        const int n = grid.size();
        const int L = static_cast<int>(window.size());

        IterationRecord rec;
        rec.window.window_start = n;
        rec.window.window_len   = L;
        rec.draft_tokens        = window;

        // One parallel verification call over the window.
        TokenGrid work = grid;
        for (VocabId tok : window) {
            work.push(tok);
        }
        ++trace.counters.target_parallel_calls;
        std::vector<Categorical> p_dists;
        p_dists.reserve(static_cast<size_t>(L));
        for (int t = 0; t < L; ++t) {
            p_dists.push_back(target.evaluate(cond, work, n + t));
        }

        // Deterministic threshold acceptance per position.
        for (int t = 0; t < L; ++t) {
            rec.drafted_positions.push_back(n + t);
            const NeighborhoodMass nbhd = build_bounded_neighborhood(
                p_dists[static_cast<size_t>(t)], window[static_cast<size_t>(t)], codebook,
                config.rule.k, config.rule.delta);
            const bool keep = threshold_accept(nbhd, tau);
            rec.accepted.push_back(keep);
            if (!keep) {
                rec.window.rejected.push_back(n + t);
            }
        }

        // Expand the rejection set and resample it sequentially; accepted
        // drafts at skipped positions stay in the prefix while later indices
        // are resampled.
        if (!rec.window.rejected.empty()) {
            rec.window.expanded = expand_rejections(rec.window.rejected, config.mode, shape, n, L);
            for (int u : rec.window.expanded) {
                const Categorical p = target.evaluate(cond, work, u);
                const VocabId     tok = src.draw_categorical(p);
                work.tokens[static_cast<size_t>(u)] = tok;
                rec.resampled.emplace_back(u, tok);
                ++trace.counters.target_seq_nfe;
            }
        }

        grid = std::move(work);
        trace.iterations.push_back(std::move(rec));
    }
    trace.final_grid = std::move(grid);
    return trace;
}

}  // namespace specgrid
