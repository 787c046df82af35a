// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#include "specgrid/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace specgrid {

double GridDistribution::total() const {
    double acc = 0.0;
    for (const auto & [grid, p] : prob) {
        acc += p;
    }
    return acc;
}

double GridDistribution::prob_of(const std::vector<VocabId> & grid) const {
    const auto it = prob.find(grid);
    return it == prob.end() ? 0.0 : it->second;
}

double max_abs_deviation(const GridDistribution & a, const GridDistribution & b) {
    double worst = 0.0;
    for (const auto & [grid, p] : a.prob) {
        worst = std::max(worst, std::abs(p - b.prob_of(grid)));
    }
    for (const auto & [grid, p] : b.prob) {
        worst = std::max(worst, std::abs(p - a.prob_of(grid)));
    }
    return worst;
}

DecodeTrace run_decoder(const DecoderSpec & spec, StochasticSource & src) {
    switch (spec.kind) {
        case DecoderKind::kBaseline:
            return decode_baseline(*spec.target, spec.cond, src, spec.initial);
        case DecoderKind::kSpecDec:
            return decode_specdec(*spec.target, *spec.drafter, spec.cond, spec.config, src,
                                  spec.initial);
        case DecoderKind::kLantern:
            return decode_lantern(*spec.target, *spec.drafter, *spec.codebook, spec.cond,
                                  spec.config, src, spec.initial);
        case DecoderKind::kMultiScale:
            return decode_multiscale(*spec.target, *spec.drafter, *spec.upsampler,
                                     *spec.downsampler, *spec.codebook, spec.cond, spec.config,
                                     src, spec.initial);
    }
    throw ParamError("unknown decoder kind");
}

GridDistribution target_law(const ArModel & target, const Conditioning & cond,
                            std::int64_t branch_limit) {
    const GridShape shape = target.grid_shape();
    const int       cells = shape.cells();
    const int       vocab = target.vocab_size();

    double scale = 1.0;
    for (int t = 0; t < cells; ++t) {
        scale *= vocab;
        if (scale > static_cast<double>(branch_limit)) {
            throw EnumerationLimitError("target_law: V^N exceeds the enumeration limit");
        }
    }

    GridDistribution law;
    TokenGrid        grid(shape);
    // Depth-first over token choices; zero-mass branches are pruned.
    auto descend = [&](auto && self, double weight) -> void {
        if (grid.complete()) {
            law.prob[grid.tokens] += weight;
            return;
        }
        const Categorical p = target.evaluate(cond, grid, grid.size());
        for (VocabId x = 0; x < vocab; ++x) {
            const double m = p.mass[static_cast<size_t>(x)];
            if (m <= 0.0) {
                continue;
            }
            grid.push(x);
            self(self, weight * m);
            grid.tokens.pop_back();
        }
    };
    descend(descend, 1.0);
    return law;
}

namespace {

// Thrown when a replayed run reaches a stochastic choice beyond its script;
// the pending options are picked up by the enumeration driver.
struct BranchSignal {};

struct BranchOption {
    std::int32_t outcome;  // token id, or 0/1 for a coin
    double       prob;
};

// Replays a decoder along a prescribed sequence of stochastic outcomes,
// accumulating the path probability. The first unscripted choice aborts the
// run and reports the available options.
class ReplaySource final : public StochasticSource {
  public:
    explicit ReplaySource(const std::vector<std::int32_t> & script) : script_(script) {}

    double weight() const { return weight_; }

    const std::vector<BranchOption> & pending() const { return pending_; }

    VocabId draw_categorical(const Categorical & dist) override {
        validate_categorical(dist);
        if (pos_ < script_.size()) {
            const VocabId tok = script_[pos_++];
            weight_ *= dist[tok];
            return tok;
        }
        for (VocabId x = 0; x < dist.size(); ++x) {
            const double m = dist.mass[static_cast<size_t>(x)];
            if (m > 0.0) {
                pending_.push_back(BranchOption{ x, m });
            }
        }
        throw BranchSignal{};
    }

    bool draw_bernoulli(double p_true) override {
        if (pos_ < script_.size()) {
            const bool b = script_[pos_++] != 0;
            weight_ *= b ? p_true : 1.0 - p_true;
            return b;
        }
        if (p_true > 0.0) {
            pending_.push_back(BranchOption{ 1, p_true });
        }
        if (p_true < 1.0) {
            pending_.push_back(BranchOption{ 0, 1.0 - p_true });
        }
        throw BranchSignal{};
    }

  private:
    const std::vector<std::int32_t> & script_;
    size_t                            pos_    = 0;
    double                            weight_ = 1.0;
    std::vector<BranchOption>         pending_;
};

}  // namespace

GridDistribution decoder_law(const DecoderSpec & spec, std::int64_t branch_limit) {
    GridDistribution law;

    std::vector<std::vector<std::int32_t>> stack;
    stack.emplace_back();
    std::int64_t expansions = 0;

    while (!stack.empty()) {
        const std::vector<std::int32_t> script = std::move(stack.back());
        stack.pop_back();

        ReplaySource src(script);
        try {
            const DecodeTrace trace = run_decoder(spec, src);
            law.prob[trace.final_grid.tokens] += src.weight();
        } catch (const BranchSignal &) {
            for (const BranchOption & opt : src.pending()) {
                if (++expansions > branch_limit) {
                    throw EnumerationLimitError(
                        "decoder_law: instance exceeds the enumeration limit");
                }
                std::vector<std::int32_t> extended = script;
                extended.push_back(opt.outcome);
                stack.push_back(std::move(extended));
            }
        }
    }
    return law;
}

Categorical per_step_law(const DecoderSpec & spec, const TokenGrid & prefix, int position,
                         std::int64_t branch_limit) {
    if (position < prefix.size() || position >= prefix.shape.cells()) {
        throw ParamError("per_step_law position must lie at or past the prefix end");
    }
    DecoderSpec from_prefix = spec;
    from_prefix.initial     = &prefix;

    const GridDistribution law   = decoder_law(from_prefix, branch_limit);
    const int              vocab = spec.target->vocab_size();
    std::vector<double>    mass(static_cast<size_t>(vocab), 0.0);
    for (const auto & [grid, p] : law.prob) {
        mass[static_cast<size_t>(grid[static_cast<size_t>(position)])] += p;
    }
    return Categorical(std::move(mass));
}

}  // namespace specgrid
