// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "specgrid/engine.hpp"
#include "test_helpers.hpp"

using namespace specgrid;
using namespace specgrid::testing;

TEST_CASE("baseline decoding samples every position sequentially") {
    const ToyMarkovModel target = build_toy_model(3, 3, GridShape{ 2, 2 }, 1.0);
    const Conditioning   cond{ 1 };

    RandomSource      rng(10);
    const DecodeTrace trace = decode_baseline(target, cond, rng);
    CHECK(trace.counters.target_seq_nfe == 4);
    CHECK(trace.counters.draft_seq_nfe == 0);
    CHECK(trace.counters.target_parallel_calls == 0);
    CHECK(trace.final_grid.complete());

    RandomSource      rng2(10);
    const DecodeTrace again = decode_baseline(target, cond, rng2);
    CHECK(traces_equivalent(trace, again));

    RandomSource      rng3(11);
    const DecodeTrace other = decode_baseline(target, cond, rng3);
    CHECK(other.final_grid.complete());
}

TEST_CASE("specdec accepts everything when the drafter equals the target") {
    const FlatFixture fx(21, 4, GridShape{ 4, 4 }, /*noise=*/0.0);
    const Conditioning cond{ 0 };

    RandomSource      rng(5);
    const DecodeTrace trace =
        decode_specdec(fx.target, fx.drafter, cond, specdec_config(5), rng);
    CHECK(trace.counters.target_seq_nfe == 0);
    CHECK(trace.final_grid.complete());
    for (const IterationRecord & it : trace.iterations) {
        CHECK(it.window.rejected.empty());
        for (double alpha : it.accept_probs) {
            CHECK(alpha == 1.0);
        }
    }

    std::int64_t drafted = 0, accepted = 0;
    for (const IterationRecord & it : trace.iterations) {
        drafted += static_cast<std::int64_t>(it.draft_tokens.size());
        accepted += std::count(it.accepted.begin(), it.accepted.end(), true);
    }
    CHECK(drafted == accepted);
}

TEST_CASE("specdec with a uniform drafter lands strictly between all-reject and all-accept") {
    const FlatFixture fx(22, 4, GridShape{ 2, 4 }, /*noise=*/1.0, /*temperature=*/0.4);
    const Conditioning cond{ 2 };

    std::int64_t drafted = 0, accepted = 0;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        RandomSource      rng(seed);
        const DecodeTrace trace =
            decode_specdec(fx.target, fx.drafter, cond, specdec_config(seed), rng);
        for (const IterationRecord & it : trace.iterations) {
            drafted += static_cast<std::int64_t>(it.draft_tokens.size());
            accepted += std::count(it.accepted.begin(), it.accepted.end(), true);
        }
    }
    const double rate = static_cast<double>(accepted) / static_cast<double>(drafted);
    CHECK(rate > 0.0);
    CHECK(rate < 1.0);
}

TEST_CASE("specdec discards the window suffix after the first rejection") {
    const FlatFixture fx(23, 3, GridShape{ 2, 4 }, /*noise=*/0.9, /*temperature=*/0.3);
    const Conditioning cond{ 1 };

    RandomSource      rng(77);
    const DecodeTrace trace =
        decode_specdec(fx.target, fx.drafter, cond, specdec_config(77), rng);
    for (const IterationRecord & it : trace.iterations) {
        REQUIRE(it.window.rejected.size() <= 1);
        if (!it.window.rejected.empty()) {
            const int t0 = it.window.rejected.front();
            // Raster-scan expansion covers the suffix from t0.
            REQUIRE(static_cast<int>(it.window.expanded.size()) ==
                    it.window.window_start + it.window.window_len - t0);
            REQUIRE(it.resampled.size() == 1);
            REQUIRE(it.resampled.front().first == t0);
            // Only the examined prefix carries decisions.
            REQUIRE(static_cast<int>(it.accepted.size()) == t0 - it.window.window_start + 1);
        }
    }
    CHECK(trace.final_grid.complete());
}

TEST_CASE("lantern at k=1 and at delta=0 is trace-identical to specdec") {
    const FlatFixture fx(24, 5, GridShape{ 4, 4 }, /*noise=*/0.7, /*temperature=*/0.5);
    const Conditioning cond{ 3 };

    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        RandomSource      rng_a(seed);
        const DecodeTrace exact =
            decode_specdec(fx.target, fx.drafter, cond, specdec_config(seed), rng_a);

        RandomSource      rng_b(seed);
        const DecodeTrace k1 = decode_lantern(fx.target, fx.drafter, fx.codebook, cond,
                                              lantern_config(seed, 1, 0.8), rng_b);
        REQUIRE(traces_equivalent(exact, k1));

        RandomSource      rng_c(seed);
        const DecodeTrace d0 = decode_lantern(fx.target, fx.drafter, fx.codebook, cond,
                                              lantern_config(seed, 5, 0.0), rng_c);
        REQUIRE(traces_equivalent(exact, d0));
    }
}

TEST_CASE("lantern with slack accepts at least as often as specdec per step") {
    const FlatFixture fx(25, 6, GridShape{ 2, 4 }, /*noise=*/0.8, /*temperature=*/0.4);
    const Conditioning cond{ 0 };

    // Pooling only raises the acceptance numerator, so at matched seeds the
    // first window's coin thresholds are at least as permissive.
    RandomSource      rng_a(9);
    const DecodeTrace exact =
        decode_specdec(fx.target, fx.drafter, cond, specdec_config(9), rng_a);
    RandomSource      rng_b(9);
    const DecodeTrace pooled = decode_lantern(fx.target, fx.drafter, fx.codebook, cond,
                                              lantern_config(9, 6, 0.5), rng_b);
    const size_t common = std::min(exact.iterations.front().accept_probs.size(),
                                   pooled.iterations.front().accept_probs.size());
    for (size_t i = 0; i < common; ++i) {
        CHECK(pooled.iterations.front().accept_probs[i] >=
              exact.iterations.front().accept_probs[i]);
    }
}

TEST_CASE("multiscale with tau=0 keeps the whole up-sampled draft") {
    const MultiScaleFixture fx(31, 5, GridShape{ 4, 4 }, 2, /*noise=*/0.5);
    const Conditioning      cond{ 2 };

    RandomSource      rng(3);
    const DecodeTrace trace =
        decode_multiscale(fx.target, fx.drafter, fx.sampler, fx.sampler, fx.codebook, cond,
                      multiscale_config(3, 2, /*tau=*/0.0, 5, 0.1), rng);
    CHECK(trace.counters.target_seq_nfe == 0);
    CHECK(trace.final_grid.complete());

    // The final grid is exactly the up-sampled draft sequence: replay the
    // drafter draws and expand.
    RandomSource replay(3);
    TokenGrid    low(GridShape{ 2, 2 });
    while (!low.complete()) {
        low.push(replay.draw_categorical(fx.drafter.evaluate(cond, low, low.size())));
    }
    std::vector<VocabId> expect;
    for (int row = 0; row < 2; ++row) {
        const std::vector<VocabId> slice(low.tokens.begin() + row * 2,
                                         low.tokens.begin() + row * 2 + 2);
        const auto high = up_sample(fx.sampler, slice, 2, TokenGrid(GridShape{ 4, 4 }));
        expect.insert(expect.end(), high.begin(), high.end());
    }
    CHECK(trace.final_grid.tokens == expect);
}

TEST_CASE("multiscale with tau>1 resamples every window from its start") {
    const MultiScaleFixture fx(32, 4, GridShape{ 4, 4 }, 2, /*noise=*/0.5);
    const Conditioning      cond{ 1 };

    RandomSource      rng(8);
    const DecodeTrace trace =
        decode_multiscale(fx.target, fx.drafter, fx.sampler, fx.sampler, fx.codebook, cond,
                      multiscale_config(8, 2, /*tau=*/1.5, 4, 0.1), rng);
    CHECK(trace.counters.target_seq_nfe == 16);
    for (const IterationRecord & it : trace.iterations) {
        CHECK(static_cast<int>(it.window.rejected.size()) == it.window.window_len);
        CHECK(static_cast<int>(it.resampled.size()) == it.window.window_len);
    }
}

TEST_CASE("multiscale windows conserve positions and counters") {
    const MultiScaleFixture fx(33, 6, GridShape{ 8, 8 }, 2, /*noise=*/0.6, /*temperature=*/0.5);
    const Conditioning      cond{ 4 };

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        RandomSource      rng(seed);
        const DecodeTrace trace =
            decode_multiscale(fx.target, fx.drafter, fx.sampler, fx.sampler, fx.codebook, cond,
                          multiscale_config(seed, 2, /*tau=*/0.2, 6, 0.1), rng);

        std::int64_t expanded_total = 0;
        for (const IterationRecord & it : trace.iterations) {
            // Accepted-and-kept positions plus the expanded set partition the
            // window.
            std::set<int> resampled;
            for (const auto & [pos, tok] : it.resampled) {
                resampled.insert(pos);
            }
            REQUIRE(resampled.size() == it.window.expanded.size());
            const int kept = it.window.window_len - static_cast<int>(it.window.expanded.size());
            int       kept_count = 0;
            for (int t = 0; t < it.window.window_len; ++t) {
                if (!resampled.count(it.window.window_start + t)) {
                    ++kept_count;
                    // A kept position must carry an accepted draft decision.
                    REQUIRE(it.accepted[static_cast<size_t>(t)]);
                }
            }
            REQUIRE(kept_count == kept);
            expanded_total += static_cast<std::int64_t>(it.window.expanded.size());
        }
        REQUIRE(trace.counters.target_seq_nfe == expanded_total);

        // The drafter emits every low-res token exactly once.
        REQUIRE(trace.counters.draft_seq_nfe == 8 * 8 / 4);

        // Final tokens match the per-window outcomes.
        REQUIRE(trace.final_grid.complete());
        for (const IterationRecord & it : trace.iterations) {
            std::set<int> resampled;
            for (const auto & [pos, tok] : it.resampled) {
                resampled.insert(pos);
                REQUIRE(trace.final_grid.tokens[static_cast<size_t>(pos)] == tok);
            }
            for (int t = 0; t < it.window.window_len; ++t) {
                const int pos = it.window.window_start + t;
                if (!resampled.count(pos)) {
                    REQUIRE(trace.final_grid.tokens[static_cast<size_t>(pos)] ==
                            it.draft_tokens[static_cast<size_t>(t)]);
                }
            }
        }
    }
}

TEST_CASE("multiscale local expansion with a grid-sized radius equals raster scan") {
    const MultiScaleFixture fx(34, 5, GridShape{ 8, 8 }, 2, /*noise=*/0.7, /*temperature=*/0.5);
    const Conditioning      cond{ 0 };

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        RandomSource      rng_a(seed);
        const DecodeTrace raster =
            decode_multiscale(fx.target, fx.drafter, fx.sampler, fx.sampler, fx.codebook, cond,
                          multiscale_config(seed, 2, 0.3, 5, 0.1, RejectionMode::raster_scan()),
                          rng_a);
        RandomSource      rng_b(seed);
        const DecodeTrace wide =
            decode_multiscale(fx.target, fx.drafter, fx.sampler, fx.sampler, fx.codebook, cond,
                          multiscale_config(seed, 2, 0.3, 5, 0.1, RejectionMode::local_expand(8)),
                          rng_b);
        REQUIRE(raster.iterations.size() == wide.iterations.size());
        for (size_t i = 0; i < raster.iterations.size(); ++i) {
            REQUIRE(raster.iterations[i].window.expanded == wide.iterations[i].window.expanded);
        }
        REQUIRE(raster.final_grid == wide.final_grid);
    }
}

namespace {

// Records every (position, prefix-before-position) pair an evaluate call
// sees, then delegates.
class SpyModel final : public ArModel {
  public:
    struct Call {
        int                  position;
        std::vector<VocabId> prefix;
    };

    explicit SpyModel(const ArModel & inner) : inner_(inner) {}

    int       vocab_size() const override { return inner_.vocab_size(); }
    GridShape grid_shape() const override { return inner_.grid_shape(); }

    Categorical evaluate(const Conditioning & cond, const TokenGrid & prefix,
                         int position) const override {
        calls.push_back(Call{ position,
                              std::vector<VocabId>(prefix.tokens.begin(),
                                                   prefix.tokens.begin() + position) });
        return inner_.evaluate(cond, prefix, position);
    }

    mutable std::vector<Call> calls;

  private:
    const ArModel & inner_;
};

}  // namespace

TEST_CASE("the drafter prefix is the down-sampled finalized grid") {
    const MultiScaleFixture fx(39, 5, GridShape{ 8, 8 }, 2, /*noise=*/0.7, /*temperature=*/0.5);
    const Conditioning      cond{ 2 };
    const SpyModel          spy_drafter(fx.drafter);

    RandomSource      rng(66);
    const DecodeTrace trace =
        decode_multiscale(fx.target, spy_drafter, fx.sampler, fx.sampler, fx.codebook, cond,
                          multiscale_config(66, 2, /*tau=*/0.3, 5, 0.1), rng);

    // Each iteration drafts one low row (4 tokens); the prefix seen by the
    // first call of iteration w must equal the down-sampled finalized rows,
    // including any resampled tokens, not the raw drafts.
    REQUIRE(spy_drafter.calls.size() == 16);
    for (int w = 0; w < 4; ++w) {
        const SpyModel::Call & first = spy_drafter.calls[static_cast<size_t>(w) * 4];
        REQUIRE(first.position == w * 4);
        if (w == 0) {
            REQUIRE(first.prefix.empty());
            continue;
        }
        const std::vector<VocabId> finalized(trace.final_grid.tokens.begin(),
                                             trace.final_grid.tokens.begin() + w * 2 * 8);
        REQUIRE(first.prefix == down_sample(fx.sampler, finalized, 8));
    }
}

TEST_CASE("resampling conditions on the hybrid prefix") {
    const MultiScaleFixture fx(40, 5, GridShape{ 4, 4 }, 2, /*noise=*/0.8, /*temperature=*/0.4);
    const Conditioning      cond{ 1 };
    const SpyModel          spy_target(fx.target);

    RandomSource      rng(13);
    const DecodeTrace trace =
        decode_multiscale(spy_target, fx.drafter, fx.sampler, fx.sampler, fx.codebook, cond,
                          multiscale_config(13, 2, /*tau=*/0.4, 5, 0.1), rng);

    for (const IterationRecord & it : trace.iterations) {
        std::map<int, VocabId> resampled(it.resampled.begin(), it.resampled.end());
        for (const auto & [u, tok] : it.resampled) {
            // The resample call is the last target evaluation at position u.
            const SpyModel::Call * call = nullptr;
            for (const SpyModel::Call & c : spy_target.calls) {
                if (c.position == u) {
                    call = &c;
                }
            }
            REQUIRE(call != nullptr);
            for (int t = 0; t < it.window.window_len; ++t) {
                const int pos = it.window.window_start + t;
                if (pos >= u) {
                    break;
                }
                const auto hit = resampled.find(pos);
                const VocabId want = hit != resampled.end()
                                         ? hit->second
                                         : it.draft_tokens[static_cast<size_t>(t)];
                REQUIRE(call->prefix[static_cast<size_t>(pos)] == want);
            }
        }
    }
}

TEST_CASE("every decoder is a pure function of models, config and seed") {
    const MultiScaleFixture fx(35, 4, GridShape{ 4, 4 }, 2, /*noise=*/0.5);
    const Conditioning      cond{ 1 };
    const DecodeConfig      config = multiscale_config(123, 2, 0.1, 4, 0.1);

    RandomSource      a(123);
    RandomSource      b(123);
    const DecodeTrace t1 =
        decode_multiscale(fx.target, fx.drafter, fx.sampler, fx.sampler, fx.codebook, cond, config, a);
    const DecodeTrace t2 =
        decode_multiscale(fx.target, fx.drafter, fx.sampler, fx.sampler, fx.codebook, cond, config, b);
    CHECK(traces_equivalent(t1, t2));
    CHECK(trace_to_json(t1) == trace_to_json(t2));
}

TEST_CASE("decoder configuration errors") {
    const MultiScaleFixture fx(36, 4, GridShape{ 4, 4 }, 2, 0.5);
    const FlatFixture       flat(37, 4, GridShape{ 4, 4 }, 0.5);
    const Conditioning      cond{ 0 };
    RandomSource            rng(1);

    // MultiScale needs r >= 2 and a matching drafter shape.
    CHECK_THROWS_AS(decode_multiscale(fx.target, fx.target, fx.sampler, fx.sampler, fx.codebook, cond,
                                  multiscale_config(1, 2, 0.1, 4, 0.1), rng),
                    ConfigError);
    {
        DecodeConfig bad = multiscale_config(1, 1, 0.1, 4, 0.1);
        CHECK_THROWS_AS(decode_multiscale(fx.target, fx.drafter, fx.sampler, fx.sampler, fx.codebook,
                                      cond, bad, rng),
                        ConfigError);
    }

    // SpecDec needs r = 1 and shared shapes.
    {
        DecodeConfig bad = specdec_config(1);
        bad.resolution_ratio = 2;
        CHECK_THROWS_AS(decode_specdec(flat.target, flat.drafter, cond, bad, rng), ConfigError);
    }
    CHECK_THROWS_AS(decode_specdec(fx.target, fx.drafter, cond, specdec_config(1), rng),
                    ConfigError);

    // Misaligned initial prefix.
    {
        TokenGrid partial(GridShape{ 4, 4 }, { 0, 1, 2 });
        CHECK_THROWS_AS(decode_multiscale(fx.target, fx.drafter, fx.sampler, fx.sampler, fx.codebook,
                                      cond, multiscale_config(1, 2, 0.1, 4, 0.1), rng, &partial),
                        ConfigError);
    }
}

TEST_CASE("trace serialization includes config, counters and the grid") {
    const MultiScaleFixture fx(38, 4, GridShape{ 4, 4 }, 2, 0.5);
    const Conditioning      cond{ 1 };
    RandomSource            rng(55);
    const DecodeTrace       trace =
        decode_multiscale(fx.target, fx.drafter, fx.sampler, fx.sampler, fx.codebook, cond,
                      multiscale_config(55, 2, 0.2, 4, 0.1), rng);
    const std::string json = trace_to_json(trace);
    CHECK(json.find("\"decoder\": \"multiscale\"") != std::string::npos);
    CHECK(json.find("\"rng_algorithm\"") != std::string::npos);
    CHECK(json.find("\"target_seq_nfe\"") != std::string::npos);
    CHECK(json.find("\"final_grid\"") != std::string::npos);
}
