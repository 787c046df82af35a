// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#include "specgrid/verify.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"
#include "specgrid/metrics.hpp"

namespace specgrid {

namespace {

struct Suite {
    const VerifyOptions &    options;
    std::vector<CheckResult> results;

    void add(std::string name, double measured, double threshold, std::string detail) {
        CheckResult r;
        r.name      = std::move(name);
        r.measured  = measured;
        r.threshold = threshold;
        r.passed    = measured <= threshold;
        r.detail    = std::move(detail);
        results.push_back(std::move(r));
    }

    void add_skipped(std::string name, std::string reason) {
        CheckResult r;
        r.name    = std::move(name);
        r.skipped = true;
        r.detail  = std::move(reason);
        results.push_back(std::move(r));
    }
};

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(6);
    out << v;
    return out.str();
}

// --- exact speculative decoding --------------------------------------------

void check_specdec_exactness(Suite & suite) {
    const GridShape shapes[] = { { 1, 1 }, { 1, 2 }, { 2, 1 }, { 2, 2 } };
    const double    noises[] = { 0.25, 0.5, 0.75 };
    const double    temps[]  = { 0.6, 1.0 };

    double worst     = 0.0;
    int    instances = 0;
    try {
        for (int s = 0; s < suite.options.exactness_seeds; ++s) {
            const int       vocab = 2 + (s % 2);
            const GridShape shape = shapes[s % 4];
            const ToyMarkovModel target =
                build_toy_model(1000 + static_cast<std::uint64_t>(s), vocab, shape, temps[s % 2]);
            const ToyMarkovModel drafter = derive_drafter(target, 1, noises[s % 3], 1);
            const Conditioning   cond{ static_cast<VocabId>(s % vocab) };

            DecodeConfig config;
            config.decoder           = DecoderKind::kSpecDec;
            config.rule              = AcceptanceRule::exact();
            config.mode              = RejectionMode::raster_scan();
            config.resolution_ratio  = 1;
            config.draft_window_rows = 1;

            DecoderSpec spec;
            spec.kind    = DecoderKind::kSpecDec;
            spec.target  = &target;
            spec.drafter = &drafter;
            spec.cond    = cond;
            spec.config  = config;

            const GridDistribution law   = decoder_law(spec, suite.options.branch_limit);
            const GridDistribution truth = target_law(target, cond, suite.options.branch_limit);
            worst = std::max(worst, max_abs_deviation(law, truth));
            worst = std::max(worst, std::abs(law.total() - 1.0));
            ++instances;
        }
    } catch (const EnumerationLimitError & e) {
        suite.add_skipped("exactness_specdec", e.what());
        return;
    }
    suite.add("exactness_specdec", worst, 1e-9,
              "draft-verify-resample law vs sequential law, " + std::to_string(instances) +
                  " enumerated instances");
}

// --- pooled acceptance TVD budget -------------------------------------------

Categorical random_simplex(RandomSource & rng, int vocab) {
    std::vector<double> m(static_cast<size_t>(vocab));
    double              total = 0.0;
    for (double & x : m) {
        x = -std::log(1.0 - rng.next_unit());
        total += x;
    }
    for (double & x : m) {
        x /= total;
    }
    return Categorical(std::move(m));
}

void check_static_tvd_bound(Suite & suite) {
    RandomSource rng(52001);
    double       worst = -1.0;
    for (int t = 0; t < suite.options.tuple_count; ++t) {
        const int         vocab = 2 + static_cast<int>(rng.next_u64() % 7);
        const Categorical p     = random_simplex(rng, vocab);
        const Codebook    cb    = build_codebook(rng.next_u64(), vocab, 2);
        const VocabId     center = static_cast<VocabId>(rng.next_u64() % vocab);
        const int         k      = 1 + static_cast<int>(rng.next_u64() % vocab);
        const double      delta  = rng.next_unit();

        const NeighborhoodMass nbhd    = build_bounded_neighborhood(p, center, cb, k, delta);
        const Categorical      relaxed = relaxed_distribution(p, nbhd);
        worst = std::max(worst, tvd(relaxed, p) - delta);
    }
    suite.add("tvd_static_bound", worst, 1e-12,
              "tvd(relaxed, p) - delta over " + std::to_string(suite.options.tuple_count) +
                  " random (p, codebook, center, k, delta) tuples");
}

void check_per_step_drift(Suite & suite) {
    double worst = -1.0;
    int    steps = 0;
    try {
        RandomSource rng(52002);
        for (double noise : { 0.3, 0.5, 0.8 }) {
            for (double delta : { 0.1, 0.2 }) {
                for (int m = 0; m < 10; ++m) {
                    const ToyMarkovModel target = build_toy_model(
                        3000 + static_cast<std::uint64_t>(m), 4, GridShape{ 2, 2 }, 0.8);
                    const ToyMarkovModel drafter = derive_drafter(target, 1, noise, 1);
                    const Codebook cb = build_codebook(4000 + static_cast<std::uint64_t>(m), 4, 2);
                    const Conditioning cond{ static_cast<VocabId>(m % 4) };

                    DecoderSpec spec;
                    spec.kind     = DecoderKind::kLantern;
                    spec.target   = &target;
                    spec.drafter  = &drafter;
                    spec.codebook = &cb;
                    spec.cond     = cond;
                    spec.config.decoder           = DecoderKind::kLantern;
                    spec.config.rule              = AcceptanceRule::pooled_ratio(4, delta);
                    spec.config.mode              = RejectionMode::raster_scan();
                    spec.config.resolution_ratio  = 1;
                    spec.config.draft_window_rows = 1;

                    for (int trial = 0; trial < 2; ++trial) {
                        TokenGrid prefix(GridShape{ 2, 2 });
                        prefix.push(static_cast<VocabId>(rng.next_u64() % 4));
                        prefix.push(static_cast<VocabId>(rng.next_u64() % 4));
                        const Categorical law =
                            per_step_law(spec, prefix, 2, suite.options.branch_limit);
                        const Categorical step = target.evaluate(cond, prefix, 2);
                        worst = std::max(worst, tvd(law, step) - delta);
                        ++steps;
                    }
                }
            }
        }
    } catch (const EnumerationLimitError & e) {
        suite.add_skipped("tvd_per_step_drift", e.what());
        return;
    }
    suite.add("tvd_per_step_drift", worst, 1e-12,
              "tvd(per-step decoder law, target conditional) - delta over " +
                  std::to_string(steps) +
                  " enumerated steps; the delta budget constrains each draft's relaxed "
                  "distribution (see tvd_static_bound), and the drafted mixture accumulates "
                  "per-draft acceptance bonuses beyond it");
}

// --- local expansion geometry -----------------------------------------------

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

void check_expansion_geometry(Suite & suite) {
    std::int64_t discrepancies = 0;
    std::int64_t cases         = 0;

    for (int h = 1; h <= 6; ++h) {
        for (int w = 1; w <= 6; ++w) {
            const GridShape shape{ h, w };
            const int       cells = shape.cells();

            std::vector<std::pair<int, int>> windows{ { 0, cells } };
            if (h >= 2) {
                windows.emplace_back(w, cells - w);  // window starting at row 1
            }
            for (const auto & [start, len] : windows) {
                // All rejection subsets of size 1..3 inside the window.
                for (int a = start; a < start + len; ++a) {
                    for (int b = a; b < start + len; ++b) {
                        for (int c = b; c < start + len; ++c) {
                            std::vector<int> rejected{ a };
                            if (b != a) {
                                rejected.push_back(b);
                            }
                            if (c != b && c != a) {
                                rejected.push_back(c);
                            }
                            for (int radius = 0; radius <= 5; ++radius) {
                                const auto got = expand_rejections(
                                    rejected, RejectionMode::local_expand(radius), shape, start,
                                    len);
                                const auto want =
                                    brute_force_expand(rejected, radius, shape, start, len);
                                discrepancies += got == want ? 0 : 1;
                                ++cases;
                            }
                        }
                    }
                }
            }
        }
    }
    suite.add("expansion_bruteforce", static_cast<double>(discrepancies), 0.0,
              std::to_string(cases) + " (grid, window, rejection set, radius) cases vs an "
                                      "independent full-grid scan");
}

void check_expansion_radius1_example(Suite & suite) {
    // Scattered rejections at (1,2) and (2,3) on a 4x6 grid, radius 1:
    // hand-derived union of the two 3x3 neighborhoods, clipped below t0.
    const std::vector<int> expanded = expand_rejections(
        { 8, 15 }, RejectionMode::local_expand(1), GridShape{ 4, 6 }, 0, 24);
    const std::vector<int> expected{ 8, 9, 10, 13, 14, 15, 16, 20, 21, 22 };

    int mismatches = expanded == expected ? 0 : 1;

    // Single rejection mid-grid, radius 1 (hand-derived).
    const std::vector<int> single =
        expand_rejections({ 5 }, RejectionMode::local_expand(1), GridShape{ 4, 4 }, 0, 16);
    mismatches += single == std::vector<int>{ 5, 6, 8, 9, 10 } ? 0 : 1;

    suite.add("expansion_radius1_example", static_cast<double>(mismatches), 0.0,
              "frozen radius-1 expansions around scattered rejections");
}

// --- reduction identities ----------------------------------------------------

void check_reduction_k1_delta0(Suite & suite) {
    const ToyMarkovModel target  = build_toy_model(61, 8, GridShape{ 8, 8 }, 0.6);
    const ToyMarkovModel drafter = derive_drafter(target, 1, 0.6, 62);
    const Codebook       cb      = build_codebook(63, 8, 2);
    const Conditioning   cond{ 5 };

    DecodeConfig sd_config;
    sd_config.decoder           = DecoderKind::kSpecDec;
    sd_config.rule              = AcceptanceRule::exact();
    sd_config.mode              = RejectionMode::raster_scan();
    sd_config.resolution_ratio  = 1;
    sd_config.draft_window_rows = 1;

    int mismatches = 0;
    for (int s = 0; s < suite.options.reduction_seeds; ++s) {
        const std::uint64_t seed = 9000 + static_cast<std::uint64_t>(s);

        RandomSource      rng_sd(seed);
        const DecodeTrace exact = decode_specdec(target, drafter, cond, sd_config, rng_sd);

        DecodeConfig k1        = sd_config;
        k1.decoder             = DecoderKind::kLantern;
        k1.rule                = AcceptanceRule::pooled_ratio(1, 0.7);
        RandomSource      rng_k1(seed);
        const DecodeTrace lantern_k1 = decode_lantern(target, drafter, cb, cond, k1, rng_k1);

        DecodeConfig d0        = sd_config;
        d0.decoder             = DecoderKind::kLantern;
        d0.rule                = AcceptanceRule::pooled_ratio(8, 0.0);
        RandomSource      rng_d0(seed);
        const DecodeTrace lantern_d0 = decode_lantern(target, drafter, cb, cond, d0, rng_d0);

        mismatches += traces_equivalent(exact, lantern_k1) ? 0 : 1;
        mismatches += traces_equivalent(exact, lantern_d0) ? 0 : 1;
    }
    suite.add("reduce_pooled_to_exact", static_cast<double>(mismatches), 0.0,
              "k=1 and delta=0 pooled traces vs exact traces over " +
                  std::to_string(suite.options.reduction_seeds) + " matched seeds");
}

void check_reduction_all_reject(Suite & suite) {
    const ToyMarkovModel  target  = build_toy_model(64, 3, GridShape{ 2, 2 }, 0.9);
    const ToyMarkovModel  drafter = derive_drafter(target, 2, 0.5, 65);
    const Codebook        cb      = build_codebook(66, 3, 2);
    const ToyBlockSampler sampler = build_block_sampler(67, cb, 2);
    const Conditioning    cond{ 1 };

    DecoderSpec spec;
    spec.kind        = DecoderKind::kMultiScale;
    spec.target      = &target;
    spec.drafter     = &drafter;
    spec.upsampler   = &sampler;
    spec.downsampler = &sampler;
    spec.codebook    = &cb;
    spec.cond        = cond;
    spec.config.decoder           = DecoderKind::kMultiScale;
    spec.config.rule              = AcceptanceRule::pooled_threshold(3, 0.1, 1.5);
    spec.config.mode              = RejectionMode::local_expand(3);
    spec.config.resolution_ratio  = 2;
    spec.config.draft_window_rows = 1;

    try {
        const GridDistribution law   = decoder_law(spec, suite.options.branch_limit);
        const GridDistribution truth = target_law(target, cond, suite.options.branch_limit);
        const double           worst =
            std::max(max_abs_deviation(law, truth), std::abs(law.total() - 1.0));
        suite.add("reduce_threshold_all_reject", worst, 1e-9,
                  "tau > 1 multi-scale law vs sequential target law");
    } catch (const EnumerationLimitError & e) {
        suite.add_skipped("reduce_threshold_all_reject", e.what());
    }
}

void check_reduction_large_radius(Suite & suite) {
    const ToyMarkovModel  target  = build_toy_model(68, 6, GridShape{ 8, 8 }, 0.5);
    const ToyMarkovModel  drafter = derive_drafter(target, 2, 0.6, 69);
    const Codebook        cb      = build_codebook(70, 6, 2);
    const ToyBlockSampler sampler = build_block_sampler(71, cb, 2);
    const Conditioning    cond{ 2 };

    DecodeConfig base;
    base.decoder           = DecoderKind::kMultiScale;
    base.rule              = AcceptanceRule::pooled_threshold(6, 0.1, 0.3);
    base.resolution_ratio  = 2;
    base.draft_window_rows = 1;

    int mismatches = 0;
    for (int s = 0; s < suite.options.reduction_seeds; ++s) {
        const std::uint64_t seed = 7000 + static_cast<std::uint64_t>(s);

        DecodeConfig raster_config = base;
        raster_config.mode         = RejectionMode::raster_scan();
        RandomSource      rng_a(seed);
        const DecodeTrace raster = decode_multiscale(target, drafter, sampler, sampler, cb, cond,
                                                 raster_config, rng_a);

        DecodeConfig wide_config = base;
        wide_config.mode         = RejectionMode::local_expand(8);
        RandomSource      rng_b(seed);
        const DecodeTrace wide = decode_multiscale(target, drafter, sampler, sampler, cb, cond,
                                               wide_config, rng_b);

        if (raster.iterations.size() != wide.iterations.size()) {
            ++mismatches;
            continue;
        }
        for (size_t i = 0; i < raster.iterations.size(); ++i) {
            if (raster.iterations[i].window.expanded != wide.iterations[i].window.expanded) {
                ++mismatches;
            }
        }
    }
    suite.add("reduce_radius_to_raster", static_cast<double>(mismatches), 0.0,
              "grid-sized expansion radius vs raster scan, per-iteration rejection sets over " +
                  std::to_string(suite.options.reduction_seeds) + " seeds");
}

// --- NFE / speedup accounting -------------------------------------------------

void check_nfe_identity(Suite & suite) {
    const ToyMarkovModel  target  = build_toy_model(81, 6, GridShape{ 8, 8 }, 0.6);
    const ToyMarkovModel  drafter2 = derive_drafter(target, 2, 0.5, 82);
    const ToyMarkovModel  drafter1 = derive_drafter(target, 1, 0.5, 83);
    const Codebook        cb       = build_codebook(84, 6, 2);
    const ToyBlockSampler sampler  = build_block_sampler(85, cb, 2);
    const Conditioning    cond{ 3 };
    const CostModel       nfe = CostModel::nfe_only();

    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        for (double tau : { 0.0, 0.1, 0.4, 1.5 }) {
            for (const RejectionMode & mode :
                 { RejectionMode::raster_scan(), RejectionMode::local_naive(),
                   RejectionMode::local_expand(3) }) {
                DecodeConfig config;
                config.decoder           = DecoderKind::kMultiScale;
                config.rule              = AcceptanceRule::pooled_threshold(6, 0.1, tau);
                config.mode              = mode;
                config.resolution_ratio  = 2;
                config.draft_window_rows = 1;
                RandomSource      rng(seed);
                const DecodeTrace trace =
                    decode_multiscale(target, drafter2, sampler, sampler, cb, cond, config, rng);
                worst = std::max(worst,
                                 consistency_deviation(summarize(trace, nfe), true));
            }
        }

        DecodeConfig sd;
        sd.decoder           = DecoderKind::kSpecDec;
        sd.rule              = AcceptanceRule::exact();
        sd.mode              = RejectionMode::raster_scan();
        sd.resolution_ratio  = 1;
        sd.draft_window_rows = 1;
        RandomSource      rng_sd(seed);
        const DecodeTrace sd_trace = decode_specdec(target, drafter1, cond, sd, rng_sd);
        worst = std::max(worst, consistency_deviation(summarize(sd_trace, nfe), true));

        RandomSource      rng_base(seed);
        const DecodeTrace base_trace = decode_baseline(target, cond, rng_base);
        worst = std::max(worst, consistency_deviation(summarize(base_trace, nfe), true));
    }
    suite.add("nfe_identity", worst, 1e-9,
              "measured speedup vs T_p/((1-a_eff)T_p + T_q) under pure-NFE costs, every run");
}

void check_speedup_spot_values(Suite & suite) {
    const double full = theoretical_speedup(4096, 256, 1.0);
    const double none = theoretical_speedup(4096, 256, 0.0);
    const double worst =
        std::max(std::abs(full - 16.0), std::abs(none - 0.9412));
    suite.add("speedup_spot_values", worst, 5e-5,
              "S(4096, 256, 1) = " + fmt(full) + ", S(4096, 256, 0) = " + fmt(none));
}

// --- ablation harness behavior -------------------------------------------------

struct EnsembleStats {
    double mean_acceptance = 0.0;
    double mean_speedup    = 0.0;
};

struct AblationSetup {
    ToyMarkovModel  target;
    ToyMarkovModel  drafter;
    Codebook        codebook;
    ToyBlockSampler sampler;
    Conditioning    cond{ 9 };

    AblationSetup()
        : target(build_toy_model(91, 16, GridShape{ 16, 16 }, 1.0)),
          drafter(derive_drafter(target, 4, 0.4, 92)),
          codebook(build_codebook(93, 16, 4)),
          sampler(build_block_sampler(94, codebook, 4)) {}

    DecodeConfig config(double tau, int k, const RejectionMode & mode) const {
        DecodeConfig c;
        c.decoder           = DecoderKind::kMultiScale;
        c.rule              = AcceptanceRule::pooled_threshold(k, 0.1, tau);
        c.mode              = mode;
        c.resolution_ratio  = 4;
        c.draft_window_rows = 1;
        return c;
    }

    RunSummary run(std::uint64_t seed, const DecodeConfig & config) const {
        RandomSource      rng(seed);
        const DecodeTrace trace =
            decode_multiscale(target, drafter, sampler, sampler, codebook, cond, config, rng);
        return summarize(trace, CostModel{});
    }

    EnsembleStats ensemble(int seeds, const DecodeConfig & config) const {
        EnsembleStats stats;
        for (int s = 0; s < seeds; ++s) {
            const RunSummary summary = run(static_cast<std::uint64_t>(s), config);
            stats.mean_acceptance += summary.acceptance_rate;
            stats.mean_speedup += summary.measured_speedup;
        }
        stats.mean_acceptance /= seeds;
        stats.mean_speedup /= seeds;
        return stats;
    }
};

const double kTauGrid[] = { 1e-5, 5e-5, 1e-4, 1e-3, 1e-2, 1e-1 };

void check_tau_monotonicity(Suite & suite, const AblationSetup & setup) {
    // Per fixed context the threshold decision is monotone in tau by
    // construction; sample contexts and confirm the wiring.
    RandomSource rng(52003);
    int          decision_violations = 0;
    for (int t = 0; t < 200; ++t) {
        const VocabId left  = static_cast<VocabId>(rng.next_u64() % 17);
        const VocabId above = static_cast<VocabId>(rng.next_u64() % 17);
        const VocabId cond  = static_cast<VocabId>(rng.next_u64() % 16);
        const Categorical & p     = setup.target.row(left, above, cond);
        const VocabId       draft = static_cast<VocabId>(rng.next_u64() % 16);
        const NeighborhoodMass nbhd =
            build_bounded_neighborhood(p, draft, setup.codebook, 16, 0.1);
        bool prev = true;
        for (double tau : kTauGrid) {
            const bool now = threshold_accept(nbhd, tau);
            if (now && !prev) {
                ++decision_violations;
            }
            prev = now;
        }
    }

    // Ensemble-mean speedup is non-increasing along the tau grid.
    double prev_speedup  = 1e300;
    double worst_increase = 0.0;
    for (double tau : kTauGrid) {
        const EnsembleStats stats = setup.ensemble(
            suite.options.ensemble_seeds, setup.config(tau, 16, RejectionMode::local_expand(3)));
        worst_increase = std::max(worst_increase, stats.mean_speedup - prev_speedup);
        prev_speedup   = stats.mean_speedup;
    }

    suite.add("ablation_tau_monotone",
              std::max(static_cast<double>(decision_violations), worst_increase), 1e-12,
              "per-context decisions monotone and ensemble-mean speedup non-increasing across "
              "the tau grid");
}

void check_pooling_gain(Suite & suite, const AblationSetup & setup) {
    double worst = -1.0;
    for (double tau : kTauGrid) {
        const EnsembleStats pooled = setup.ensemble(
            suite.options.ensemble_seeds, setup.config(tau, 16, RejectionMode::local_expand(3)));
        const EnsembleStats single = setup.ensemble(
            suite.options.ensemble_seeds, setup.config(tau, 1, RejectionMode::local_expand(3)));
        worst = std::max(worst, single.mean_acceptance - pooled.mean_acceptance);
    }
    suite.add("ablation_pooling_gain", worst, 1e-12,
              "mean acceptance with k=V minus k=1, maximized over the tau grid (negative means "
              "pooling always helps)");
}

void check_mode_ordering(Suite & suite, const AblationSetup & setup) {
    // tau = 0.1 sits at the top of the default sweep, where rejections are
    // frequent and the per-run ordering margins are wide; with sparse
    // rejections the three modes' trajectories diverge too much for a
    // per-run guarantee (the per-window nesting is covered by
    // expansion_bruteforce).
    const double tau        = 0.1;
    int          violations = 0;
    for (int s = 0; s < suite.options.ensemble_seeds; ++s) {
        const std::uint64_t seed = static_cast<std::uint64_t>(s);
        const RunSummary    naive =
            setup.run(seed, setup.config(tau, 16, RejectionMode::local_naive()));
        const RunSummary expand =
            setup.run(seed, setup.config(tau, 16, RejectionMode::local_expand(3)));
        const RunSummary raster =
            setup.run(seed, setup.config(tau, 16, RejectionMode::raster_scan()));
        if (naive.counters.target_seq_nfe > expand.counters.target_seq_nfe ||
            expand.counters.target_seq_nfe > raster.counters.target_seq_nfe) {
            ++violations;
        }
    }
    suite.add("ablation_mode_ordering", static_cast<double>(violations), 0.0,
              "per-run resampled-position totals ordered naive <= expand(3) <= raster over " +
                  std::to_string(suite.options.ensemble_seeds) + " seeds at tau=" + fmt(tau));
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions & options) {
    Suite suite{ options, {} };

    check_specdec_exactness(suite);
    check_static_tvd_bound(suite);
    check_per_step_drift(suite);
    check_expansion_geometry(suite);
    check_expansion_radius1_example(suite);
    check_reduction_k1_delta0(suite);
    check_reduction_all_reject(suite);
    check_reduction_large_radius(suite);
    check_nfe_identity(suite);
    check_speedup_spot_values(suite);

    const AblationSetup setup;
    check_tau_monotonicity(suite, setup);
    check_pooling_gain(suite, setup);
    check_mode_ordering(suite, setup);

    return suite.results;
}

bool all_passed(const std::vector<CheckResult> & results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CheckResult & r) { return r.passed || r.skipped; });
}

std::string verification_report_json(const std::vector<CheckResult> & results) {
    nlohmann::json checks = nlohmann::json::array();
    for (const CheckResult & r : results) {
        checks.push_back(nlohmann::json{ { "name", r.name },
                                         { "passed", r.passed },
                                         { "skipped", r.skipped },
                                         { "measured", r.measured },
                                         { "threshold", r.threshold },
                                         { "detail", r.detail } });
    }
    const nlohmann::json doc{ { "rng_algorithm", RandomSource::kAlgorithm },
                              { "all_passed", all_passed(results) },
                              { "checks", checks } };
    return doc.dump(2);
}

}  // namespace specgrid
