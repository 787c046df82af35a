// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <filesystem>

#include "doctest.h"
#include "specgrid/models.hpp"

using namespace specgrid;

TEST_CASE("toy model construction is deterministic and well formed") {
    const GridShape      shape{ 2, 2 };
    const ToyMarkovModel a = build_toy_model(5, 3, shape, 1.0);
    const ToyMarkovModel b = build_toy_model(5, 3, shape, 1.0);
    CHECK(a == b);

    // (V+1)^2 * V context rows, sentinel included.
    CHECK(a.context_count() == 4 * 4 * 3);

    CHECK_THROWS_AS(build_toy_model(5, 1, shape, 1.0), ParamError);
    CHECK_THROWS_AS(build_toy_model(5, 3, shape, 0.0), ParamError);
}

TEST_CASE("temperature controls row peakedness") {
    const GridShape shape{ 2, 2 };

    // At temperature 0.01 every row is essentially one-hot.
    const ToyMarkovModel cold = build_toy_model(5, 6, shape, 0.01);
    for (VocabId left : { 0, 3, 6 }) {
        for (VocabId above : { 1, 6 }) {
            for (VocabId cond = 0; cond < 6; ++cond) {
                const Categorical & row = cold.row(left, above, cond);
                CHECK(*std::max_element(row.mass.begin(), row.mass.end()) > 0.99);
            }
        }
    }

    // Max mass grows monotonically as the temperature drops (softmax of
    // fixed logits), so the average sharpens too.
    double prev = 0.0;
    for (double temp : { 8.0, 2.0, 0.5, 0.1 }) {
        const ToyMarkovModel model = build_toy_model(5, 6, shape, temp);
        double               avg_max = 0.0;
        for (int ctx = 0; ctx < model.context_count(); ++ctx) {
            const VocabId left  = static_cast<VocabId>(ctx / (7 * 6));
            const VocabId above = static_cast<VocabId>((ctx / 6) % 7);
            const VocabId cond  = static_cast<VocabId>(ctx % 6);
            const auto &  row   = model.row(left, above, cond);
            avg_max += *std::max_element(row.mass.begin(), row.mass.end());
        }
        avg_max /= model.context_count();
        CHECK(avg_max > prev);
        prev = avg_max;
    }
}

TEST_CASE("evaluate reads the left/above/conditioning context") {
    const GridShape      shape{ 2, 3 };
    const ToyMarkovModel model = build_toy_model(9, 4, shape, 1.0);
    const Conditioning   cond{ 2 };

    TokenGrid prefix(shape, { 1, 3, 0, 2 });

    // Position 4 = cell (1, 1): left is token 2, above is token 3.
    CHECK(model.evaluate(cond, prefix, 4).mass == model.row(2, 3, 2).mass);
    // Position 0 has no neighbors: both sentinels.
    CHECK(model.evaluate(cond, TokenGrid(shape), 0).mass ==
          model.row(model.sentinel(), model.sentinel(), 2).mass);
    // Position 2 = cell (0, 2): above is missing.
    CHECK(model.evaluate(cond, prefix, 2).mass == model.row(3, model.sentinel(), 2).mass);
    // Position 3 = cell (1, 0): left is missing.
    CHECK(model.evaluate(cond, prefix, 3).mass == model.row(model.sentinel(), 1, 2).mass);

    // Purity: repeated evaluation of random (prefix, position) pairs is
    // bit-identical, and tokens at or past the position are ignored.
    RandomSource rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const int pos = static_cast<int>(rng.next_u64() % 6);
        TokenGrid p(shape);
        for (int t = 0; t < 6; ++t) {
            p.push(static_cast<VocabId>(rng.next_u64() % 4));
        }
        const Categorical once  = model.evaluate(cond, p, pos);
        const Categorical again = model.evaluate(cond, p, pos);
        REQUIRE(once.mass == again.mass);

        TokenGrid truncated(shape,
                            std::vector<VocabId>(p.tokens.begin(), p.tokens.begin() + pos));
        REQUIRE(model.evaluate(cond, truncated, pos).mass == once.mass);
    }

    CHECK_THROWS_AS(model.evaluate(cond, TokenGrid(shape), 3), ContractError);
    CHECK_THROWS_AS(model.evaluate(cond, prefix, 6), IndexError);
}

TEST_CASE("derive_drafter mixes the target with uniform noise") {
    const GridShape      shape{ 4, 4 };
    const ToyMarkovModel target = build_toy_model(5, 4, shape, 1.0);

    // noise=0, r=1: every distribution equals the target's.
    const ToyMarkovModel clone = derive_drafter(target, 1, 0.0, 77);
    for (VocabId left = 0; left <= 4; ++left) {
        for (VocabId above = 0; above <= 4; ++above) {
            for (VocabId cond = 0; cond < 4; ++cond) {
                REQUIRE(clone.row(left, above, cond).mass == target.row(left, above, cond).mass);
            }
        }
    }

    // noise=1: uniform everywhere.
    const ToyMarkovModel uniform = derive_drafter(target, 2, 1.0, 78);
    CHECK(uniform.grid_shape() == GridShape{ 2, 2 });
    for (double m : uniform.row(0, 1, 2).mass) {
        CHECK(m == doctest::Approx(0.25).epsilon(1e-12));
    }

    // noise=0.5 against a hand-built row.
    {
        std::vector<Categorical> table(static_cast<size_t>(5 * 5 * 4),
                                       Categorical({ 0.7, 0.1, 0.1, 0.1 }));
        const ToyMarkovModel flat(1, 4, shape, 1.0, table);
        const ToyMarkovModel mixed = derive_drafter(flat, 2, 0.5, 79);
        const Categorical &  row   = mixed.row(0, 0, 0);
        CHECK(row.mass[0] == doctest::Approx(0.475).epsilon(1e-12));
        CHECK(row.mass[1] == doctest::Approx(0.175).epsilon(1e-12));
        CHECK(row.mass[2] == doctest::Approx(0.175).epsilon(1e-12));
        CHECK(row.mass[3] == doctest::Approx(0.175).epsilon(1e-12));
    }

    CHECK_THROWS_AS(derive_drafter(target, 3, 0.5, 80), ParamError);
    CHECK_THROWS_AS(derive_drafter(target, 2, 1.5, 80), ParamError);
}

TEST_CASE("toy model serialization round trips exactly") {
    const ToyMarkovModel model = build_toy_model(13, 5, GridShape{ 4, 8 }, 0.7);
    const std::string    path =
        (std::filesystem::temp_directory_path() / "specgrid_model.txt").string();
    save_toy_model(path, model);
    const ToyMarkovModel back = load_toy_model(path);
    CHECK(back == model);
    std::filesystem::remove(path);
}

TEST_CASE("block sampler expands and collapses blocks") {
    const Codebook        cb      = build_codebook(21, 6, 2);
    const ToyBlockSampler sampler = build_block_sampler(22, cb, 2);

    // Round trip over every token: down(up(y)) == y.
    for (VocabId y = 0; y < 6; ++y) {
        const std::vector<VocabId> high =
            up_sample(sampler, { y }, 1, TokenGrid(GridShape{ 2, 2 }));
        REQUIRE(high.size() == 4);
        CHECK(high == sampler.block_template(y));
        const std::vector<VocabId> low = down_sample(sampler, high, 2);
        REQUIRE(low.size() == 1);
        CHECK(low[0] == y);
    }

    // r=2, one low row of 2 tokens -> 8 high tokens laid out as 2 rows of 4.
    {
        const std::vector<VocabId> high =
            up_sample(sampler, { 1, 4 }, 2, TokenGrid(GridShape{ 4, 4 }));
        REQUIRE(high.size() == 8);
        const auto & t1 = sampler.block_template(1);
        const auto & t4 = sampler.block_template(4);
        CHECK(high == std::vector<VocabId>{ t1[0], t1[1], t4[0], t4[1],
                                            t1[2], t1[3], t4[2], t4[3] });

        // 2 high rows of width 4 -> 2 low tokens.
        CHECK(down_sample(sampler, high, 4) == std::vector<VocabId>{ 1, 4 });
    }

    // Perturbing one cell still maps to the nearest template.
    {
        std::vector<VocabId> block = sampler.block_template(3);
        block[1]                   = static_cast<VocabId>((block[1] + 1) % 6);
        VocabId best      = 0;
        double  best_dist = 1e300;
        for (VocabId id = 0; id < 6; ++id) {
            double acc = 0.0;
            for (size_t cell = 0; cell < block.size(); ++cell) {
                acc += codebook_distance_sq(cb, block[cell], sampler.block_template(id)[cell]);
            }
            if (acc < best_dist) {
                best_dist = acc;
                best      = id;
            }
        }
        CHECK(sampler.nearest_template(block) == best);
    }

    CHECK_THROWS_AS(up_sample(sampler, {}, 1, TokenGrid(GridShape{ 2, 2 })), ContractError);
    CHECK_THROWS_AS(up_sample(sampler, { 1, 2, 3 }, 2, TokenGrid(GridShape{ 2, 2 })),
                    ContractError);
    CHECK_THROWS_AS(down_sample(sampler, { 1, 2 }, 2), ContractError);      // one row, need r
    CHECK_THROWS_AS(down_sample(sampler, { 1, 2, 3 }, 2), ContractError);   // partial row
}

TEST_CASE("upsampler output is row causal") {
    const Codebook        cb      = build_codebook(33, 5, 2);
    const ToyBlockSampler sampler = build_block_sampler(34, cb, 2);
    const TokenGrid       ctx(GridShape{ 4, 4 });

    // Changing low-res row 1 must not change the high-res rows derived from
    // row 0.
    const std::vector<VocabId> base    = up_sample(sampler, { 0, 1, 2, 3 }, 2, ctx);
    const std::vector<VocabId> changed = up_sample(sampler, { 0, 1, 4, 4 }, 2, ctx);
    CHECK(std::equal(base.begin(), base.begin() + 8, changed.begin()));
}

TEST_CASE("block template serialization round trips") {
    const Codebook cb = build_codebook(55, 6, 3);
    const std::vector<ToyBlockSampler> samplers{ build_block_sampler(56, cb, 2),
                                                 build_block_sampler(56, cb, 4) };
    const std::string path =
        (std::filesystem::temp_directory_path() / "specgrid_blocks.txt").string();
    save_block_samplers(path, samplers);
    const std::vector<ToyBlockSampler> back = load_block_samplers(path, cb);
    REQUIRE(back.size() == 2);
    CHECK(back[0] == samplers[0]);
    CHECK(back[1] == samplers[1]);
    std::filesystem::remove(path);
}
