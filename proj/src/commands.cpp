// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#include "specgrid/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "specgrid/metrics.hpp"
#include "specgrid/oracle.hpp"

namespace specgrid {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void ensure_dir(const std::string & dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create directory " + dir + ": " + ec.message());
    }
}

json config_echo(const Config & config) {
    json echo = json::object();
    for (const auto & [key, value] : config.values()) {
        echo[key] = value;
    }
    return echo;
}

Config effective_config(const Config & raw) {
    Config merged = Config::defaults();
    for (const auto & [key, value] : raw.values()) {
        merged.set(key, value);
    }
    return merged;
}

void write_text(const std::string & path, const std::string & text) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    out << text;
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

}  // namespace

const ToyBlockSampler & AssetBundle::sampler_for(int factor) const {
    for (const ToyBlockSampler & s : samplers) {
        if (s.factor() == factor) {
            return s;
        }
    }
    throw ConfigError("no block templates for factor " + std::to_string(factor) +
                      "; run gen-models first");
}

void cmd_gen_models(const Config & raw, const std::string & out_dir) {
    const RunSpec spec = run_spec_from_config(raw);
    ensure_dir(out_dir);

    const ToyMarkovModel target =
        build_toy_model(spec.model_seed, spec.vocab, spec.grid, spec.temperature);
    save_toy_model(out_dir + "/target.toymodel", target);

    for (int r : { 2, 4 }) {
        const ToyMarkovModel drafter =
            derive_drafter(target, r, spec.noise, spec.drafter_seed + static_cast<std::uint64_t>(r));
        save_toy_model(out_dir + "/drafter_r" + std::to_string(r) + ".toymodel", drafter);
    }

    const Codebook codebook = build_codebook(spec.codebook_seed, spec.vocab, spec.codebook_dim);
    save_codebook(out_dir + "/codebook.csv", codebook);

    std::vector<ToyBlockSampler> samplers;
    for (int r : { 2, 4 }) {
        samplers.push_back(build_block_sampler(spec.sampler_seed, codebook, r));
    }
    save_block_samplers(out_dir + "/samplers.blocks", samplers);
}

AssetBundle load_assets(const Config & raw, const std::string & assets_dir) {
    const RunSpec spec = run_spec_from_config(raw);

    ToyMarkovModel target = load_toy_model(assets_dir + "/target.toymodel");
    if (target.vocab_size() != spec.vocab || !(target.grid_shape() == spec.grid)) {
        throw ConfigError("target asset does not match the configured grid/vocab");
    }
    Codebook codebook = load_codebook(assets_dir + "/codebook.csv");
    if (codebook.size() != spec.vocab) {
        throw ConfigError("codebook asset does not match the configured vocab");
    }

    AssetBundle bundle{ std::move(target), std::move(codebook), {}, {} };
    for (int r : { 2, 4 }) {
        const std::string path = assets_dir + "/drafter_r" + std::to_string(r) + ".toymodel";
        if (fs::exists(path)) {
            bundle.drafters.emplace(r, load_toy_model(path));
        }
    }
    const std::string blocks = assets_dir + "/samplers.blocks";
    if (fs::exists(blocks)) {
        bundle.samplers = load_block_samplers(blocks, bundle.codebook);
    }
    return bundle;
}

namespace {

// Drafter for the requested ratio: the asset file when it exists, otherwise
// derived in memory from the target (always the case for r = 1, which
// gen-models does not write).
ToyMarkovModel resolve_drafter(const AssetBundle & bundle, const RunSpec & spec, int r,
                               double noise) {
    const auto it = bundle.drafters.find(r);
    if (it != bundle.drafters.end() && noise == spec.noise) {
        return it->second;
    }
    return derive_drafter(bundle.target, r, noise,
                          spec.drafter_seed + static_cast<std::uint64_t>(r));
}

ToyBlockSampler resolve_sampler(const AssetBundle & bundle, const RunSpec & spec, int r) {
    for (const ToyBlockSampler & s : bundle.samplers) {
        if (s.factor() == r) {
            return s;
        }
    }
    return build_block_sampler(spec.sampler_seed, bundle.codebook, r);
}

DecodeTrace run_one(const AssetBundle & bundle, const RunSpec & spec, const DecodeConfig & config,
                    double noise, std::uint64_t seed) {
    RandomSource rng(seed);
    switch (config.decoder) {
        case DecoderKind::kBaseline:
            return decode_baseline(bundle.target, spec.cond, rng);
        case DecoderKind::kSpecDec: {
            const ToyMarkovModel drafter = resolve_drafter(bundle, spec, 1, noise);
            return decode_specdec(bundle.target, drafter, spec.cond, config, rng);
        }
        case DecoderKind::kLantern: {
            const ToyMarkovModel drafter = resolve_drafter(bundle, spec, 1, noise);
            return decode_lantern(bundle.target, drafter, bundle.codebook, spec.cond, config,
                                  rng);
        }
        case DecoderKind::kMultiScale: {
            const int            r       = config.resolution_ratio;
            const ToyMarkovModel drafter = resolve_drafter(bundle, spec, r, noise);
            const ToyBlockSampler sampler = resolve_sampler(bundle, spec, r);
            return decode_multiscale(bundle.target, drafter, sampler, sampler, bundle.codebook,
                                 spec.cond, config, rng);
        }
    }
    throw ConfigError("unknown decoder");
}

}  // namespace

void cmd_decode(const Config & raw, const std::string & assets_dir, const std::string & out_dir) {
    const Config  config = effective_config(raw);
    const RunSpec spec   = run_spec_from_config(config);
    ensure_dir(out_dir);

    const AssetBundle bundle = load_assets(config, assets_dir);
    const DecodeTrace trace =
        run_one(bundle, spec, spec.decode, spec.noise, spec.decode.seed);
    const RunSummary summary = summarize(trace, spec.cost);

    save_trace(out_dir + "/trace.json", trace);

    json doc                = json::parse(summary_to_json(summary));
    doc["effective_config"] = config_echo(config);
    write_text(out_dir + "/summary.json", doc.dump(2) + "\n");
}

namespace {

struct BenchRow {
    std::string value;
    double      acc_rate    = 0.0;
    double      a_effective = 0.0;
    double      measured    = 0.0;
    double      theoretical = 0.0;
    double      deviation   = 0.0;
};

std::string fmt_mean(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

void cmd_bench(const Config & raw, const std::string & assets_dir, const std::string & out_dir) {
    const Config  config = effective_config(raw);
    const RunSpec spec   = run_spec_from_config(config);
    ensure_dir(out_dir);

    const AssetBundle bundle = load_assets(config, assets_dir);
    const std::string axis   = spec.bench_axis;
    if (spec.bench_values.empty()) {
        throw ConfigError("bench.values is empty");
    }

    const bool multiscale_only = axis == "tau" || axis == "radius" || axis == "mode" ||
                             axis == "pooling_k";
    if (multiscale_only && spec.decode.decoder != DecoderKind::kMultiScale) {
        throw ConfigError("bench axis '" + axis + "' requires decode.decoder=multiscale");
    }
    if (axis != "tau" && axis != "noise" && axis != "radius" && axis != "mode" &&
        axis != "pooling_k") {
        throw ConfigError("unknown bench axis '" + axis + "'");
    }
    if (axis == "noise" && spec.decode.decoder == DecoderKind::kBaseline) {
        throw ConfigError("bench axis 'noise' needs a drafting decoder");
    }

    const RandomSource seed_root(spec.decode.seed);
    std::vector<BenchRow> rows;
    for (size_t point = 0; point < spec.bench_values.size(); ++point) {
        const std::string & value  = spec.bench_values[point];
        DecodeConfig        decode = spec.decode;
        double              noise  = spec.noise;

        if (axis == "tau") {
            decode.rule.tau = parse_double(value);
        } else if (axis == "noise") {
            noise = parse_double(value);
            if (noise < 0.0 || noise > 1.0) {
                throw ConfigError("bench noise values must lie in [0, 1]");
            }
        } else if (axis == "radius") {
            decode.mode = RejectionMode::local_expand(std::stoi(value));
        } else if (axis == "mode") {
            if (value == "raster_scan") {
                decode.mode = RejectionMode::raster_scan();
            } else if (value == "local_naive") {
                decode.mode = RejectionMode::local_naive();
            } else if (value == "local_expand") {
                decode.mode = RejectionMode::local_expand(decode.mode.radius);
            } else {
                throw ConfigError("unknown mode value '" + value + "'");
            }
        } else if (axis == "pooling_k") {
            decode.rule.k = std::min(std::stoi(value), spec.vocab);
        }
        decode.rule.validate(spec.vocab);

        BenchRow row;
        row.value = value;
        for (int s = 0; s < spec.bench_seeds; ++s) {
            // Matched seed ensembles across operating points.
            RandomSource stream = seed_root.substream(static_cast<std::uint64_t>(s));
            const DecodeTrace trace = run_one(bundle, spec, decode, noise, stream.seed());
            const RunSummary  summary = summarize(trace, spec.cost);
            row.acc_rate += summary.acceptance_rate;
            row.a_effective += summary.a_effective;
            row.measured += summary.measured_speedup;
            row.theoretical += summary.theoretical_speedup;
            row.deviation += summary.deviation;
        }
        const double n = static_cast<double>(spec.bench_seeds);
        row.acc_rate /= n;
        row.a_effective /= n;
        row.measured /= n;
        row.theoretical /= n;
        row.deviation /= n;
        rows.push_back(std::move(row));
    }

    std::ostringstream csv;
    csv << "axis,value,acc_rate,a_effective,speedup_measured,speedup_theoretical,deviation\n";
    for (const BenchRow & row : rows) {
        csv << axis << "," << row.value << "," << fmt_mean(row.acc_rate) << ","
            << fmt_mean(row.a_effective) << "," << fmt_mean(row.measured) << ","
            << fmt_mean(row.theoretical) << "," << fmt_mean(row.deviation) << "\n";
    }
    write_text(out_dir + "/bench.csv", csv.str());

    const json meta{ { "axis", axis },
                     { "seeds", spec.bench_seeds },
                     { "rng_algorithm", RandomSource::kAlgorithm },
                     { "effective_config", config_echo(config) } };
    write_text(out_dir + "/bench_meta.json", meta.dump(2) + "\n");
}

bool cmd_verify(const Config & raw, const std::string & out_dir) {
    const Config config = effective_config(raw);
    ensure_dir(out_dir);

    VerifyOptions options;
    options.exactness_seeds = config.get_int("verify.exactness_seeds");
    options.tuple_count     = config.get_int("verify.tuple_count");
    options.reduction_seeds = config.get_int("verify.reduction_seeds");
    options.ensemble_seeds  = config.get_int("verify.ensemble_seeds");
    options.branch_limit    = config.get_int("verify.branch_limit");

    const std::vector<CheckResult> results = run_verification(options);
    for (const CheckResult & r : results) {
        if (r.skipped) {
            std::printf("[SKIP] %-28s %s\n", r.name.c_str(), r.detail.c_str());
        } else {
            std::printf("[%s] %-28s measured=%.3g threshold=%.3g\n", r.passed ? "PASS" : "FAIL",
                        r.name.c_str(), r.measured, r.threshold);
        }
    }

    json doc                = json::parse(verification_report_json(results));
    doc["effective_config"] = config_echo(config);
    write_text(out_dir + "/verify_report.json", doc.dump(2) + "\n");
    return all_passed(results);
}

}  // namespace specgrid
