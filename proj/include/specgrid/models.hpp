// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specgrid/core.hpp"

namespace specgrid {

// Prompt surrogate. The same conditioning token must be handed to the target
// and the drafter of one run.
struct Conditioning {
    VocabId seed_token = 0;

    bool operator==(const Conditioning &) const = default;
};

// Conditional next-token distribution over a 2D grid. evaluate() must be a
// pure function of (conditioning, prefix contents before `position`,
// position); callers may pass a prefix that extends past `position` and the
// extra tokens must not influence the result.
class ArModel {
  public:
    virtual ~ArModel() = default;

    virtual int       vocab_size() const = 0;
    virtual GridShape grid_shape() const = 0;

    virtual Categorical evaluate(const Conditioning & cond, const TokenGrid & prefix,
                                 int position) const = 0;
};

// Desk-scale autoregressive model: the distribution at a cell depends on its
// left neighbor, its above neighbor, and the conditioning token. Border cells
// use the sentinel id V for the missing neighbor.
class ToyMarkovModel final : public ArModel {
  public:
    ToyMarkovModel(std::uint64_t seed, int vocab_size, GridShape shape, double temperature,
                   std::vector<Categorical> table);

    int       vocab_size() const override { return vocab_size_; }
    GridShape grid_shape() const override { return shape_; }

    std::uint64_t seed() const { return seed_; }
    double        temperature() const { return temperature_; }

    VocabId sentinel() const { return vocab_size_; }

    // Row count is (V+1)^2 * V: left/above range over [0, V] (sentinel
    // included), conditioning over [0, V).
    int context_count() const { return (vocab_size_ + 1) * (vocab_size_ + 1) * vocab_size_; }

    const Categorical & row(VocabId left, VocabId above, VocabId cond) const;

    Categorical evaluate(const Conditioning & cond, const TokenGrid & prefix,
                         int position) const override;

    bool operator==(const ToyMarkovModel & other) const;

  private:
    std::uint64_t            seed_;
    int                      vocab_size_;
    GridShape                shape_;
    double                   temperature_;
    std::vector<Categorical> table_;
};

// Deterministically generates a model whose rows sharpen as temperature
// drops: each row is a softmax over jittered ranks, so the top token always
// dominates by a margin once the temperature is small.
ToyMarkovModel build_toy_model(std::uint64_t model_seed, int vocab_size, GridShape shape,
                               double temperature);

// Low-resolution drafter: the target's table mixed with uniform noise,
// q = (1 - noise) * p + noise * uniform, at shape (H/r, W/r). `noise` is the
// single dial controlling draft quality.
ToyMarkovModel derive_drafter(const ToyMarkovModel & target, int r, double noise,
                              std::uint64_t drafter_seed);

void           save_toy_model(const std::string & path, const ToyMarkovModel & model);
ToyMarkovModel load_toy_model(const std::string & path);

// ---------------------------------------------------------------------------
// Up/down-samplers
// ---------------------------------------------------------------------------

// Expands complete low-resolution rows into r times as many complete
// high-resolution rows (r*r tokens out per token in). Implementations must be
// row-causal: high-res outputs for low-res row b may depend only on low-res
// rows <= b and the finalized high-res prefix.
class Upsampler {
  public:
    virtual ~Upsampler() = default;

    virtual int factor() const = 0;

    virtual std::vector<VocabId> apply(const std::vector<VocabId> & low_rows, int low_width,
                                       const TokenGrid & high_context) const = 0;
};

// Collapses exactly r complete high-resolution rows into one low-resolution
// row. Only ever sees verified tokens.
class Downsampler {
  public:
    virtual ~Downsampler() = default;

    virtual int factor() const = 0;

    virtual std::vector<VocabId> apply(const std::vector<VocabId> & high_block_rows,
                                       int high_width) const = 0;
};

// Template-based sampler: every token expands to a fixed r x r block, and a
// block maps back to the token whose template is nearest in summed codebook
// distance (ties to the lowest id). Templates are mutually distinct, so
// down(up(y)) == y for every token.
class ToyBlockSampler final : public Upsampler, public Downsampler {
  public:
    ToyBlockSampler(int factor, Codebook codebook, std::vector<std::vector<VocabId>> templates);

    int factor() const override { return factor_; }
    int vocab_size() const { return static_cast<int>(templates_.size()); }

    const std::vector<VocabId> & block_template(VocabId id) const {
        return templates_[static_cast<size_t>(id)];
    }

    std::vector<VocabId> apply(const std::vector<VocabId> & low_rows, int low_width,
                               const TokenGrid & high_context) const override;

    std::vector<VocabId> apply(const std::vector<VocabId> & high_block_rows,
                               int high_width) const override;

    VocabId nearest_template(const std::vector<VocabId> & block) const;

    bool operator==(const ToyBlockSampler & other) const;

  private:
    int                               factor_;
    Codebook                          codebook_;
    std::vector<std::vector<VocabId>> templates_;
};

ToyBlockSampler build_block_sampler(std::uint64_t sampler_seed, const Codebook & codebook,
                                    int factor);

// One file can hold the template tables for several factors.
void save_block_samplers(const std::string & path, const std::vector<ToyBlockSampler> & samplers);
std::vector<ToyBlockSampler> load_block_samplers(const std::string & path,
                                                 const Codebook &    codebook);

// ---------------------------------------------------------------------------
// Sampler operations (validated front doors used by the engine)
// ---------------------------------------------------------------------------

// `low_rows` must be non-empty complete rows of width low_width; the result
// covers r complete high-res rows per low-res row, raster order.
std::vector<VocabId> up_sample(const Upsampler & sampler, const std::vector<VocabId> & low_rows,
                               int low_width, const TokenGrid & high_context);

// `high_rows` must be a non-empty multiple of r complete rows of width
// high_width; emits one token per r x r block, raster order.
std::vector<VocabId> down_sample(const Downsampler & sampler,
                                 const std::vector<VocabId> & high_rows, int high_width);

}  // namespace specgrid
