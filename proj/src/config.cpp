// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#include "specgrid/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace specgrid {

namespace {

std::string trim(const std::string & s) {
    const size_t begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    const size_t end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

Config Config::defaults() {
    Config c;
    c.set("grid.height", "16");
    c.set("grid.width", "16");
    c.set("grid.vocab", "16");
    c.set("codebook.dim", "4");
    c.set("codebook.seed", "7");
    c.set("models.model_seed", "1");
    c.set("models.temperature", "1");
    c.set("models.noise", "0.4");
    c.set("models.drafter_seed", "2");
    c.set("models.sampler_seed", "3");
    c.set("decode.decoder", "multiscale");
    c.set("decode.r", "4");
    c.set("decode.draft_window_rows", "1");
    c.set("decode.seed", "1234");
    c.set("decode.conditioning", "0");
    c.set("decode.k", "1000");
    c.set("decode.delta", "0.1");
    c.set("decode.tau", "1e-4");
    c.set("decode.mode", "local_expand");
    c.set("decode.radius", "3");
    c.set("cost.c_seq", "1");
    c.set("cost.c_par", "1");
    c.set("cost.c_resample_overhead", "0.05");
    c.set("bench.axis", "tau");
    c.set("bench.values", "1e-5,5e-5,1e-4,1e-3,1e-2,1e-1");
    c.set("bench.seeds", "200");
    c.set("verify.exactness_seeds", "20");
    c.set("verify.tuple_count", "1000");
    c.set("verify.reduction_seeds", "100");
    c.set("verify.ensemble_seeds", "200");
    c.set("verify.branch_limit", "1000000");
    return c;
}

Config Config::parse_text(const std::string & text) {
    Config             c;
    std::istringstream in(text);
    std::string        line;
    std::string        section;
    int                lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') {
            continue;
        }
        if (stripped.front() == '[' && stripped.back() == ']') {
            section = trim(stripped.substr(1, stripped.size() - 2));
            if (section.empty()) {
                throw ConfigError("empty section name at line " + std::to_string(lineno));
            }
            continue;
        }
        const size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected key=value at line " + std::to_string(lineno));
        }
        const std::string key   = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("empty key at line " + std::to_string(lineno));
        }
        c.set(section.empty() ? key : section + "." + key, value);
    }
    return c;
}

Config Config::load(const std::string & path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_text(buffer.str());
}

std::string Config::to_text() const {
    // Keys are grouped back into their sections in sorted order.
    std::ostringstream out;
    std::string        section;
    bool               first = true;
    for (const auto & [key, value] : values_) {
        const size_t      dot  = key.find('.');
        const std::string sect = dot == std::string::npos ? "" : key.substr(0, dot);
        const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
        if (sect != section || first) {
            if (!first) {
                out << "\n";
            }
            out << "[" << sect << "]\n";
            section = sect;
            first   = false;
        }
        out << name << "=" << value << "\n";
    }
    return out.str();
}

void Config::save(const std::string & path) const {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    out << to_text();
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

const std::string & Config::get(const std::string & key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        throw ConfigError("missing config key '" + key + "'");
    }
    return it->second;
}

std::string Config::get_or(const std::string & key, const std::string & fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string & key) const {
    try {
        return parse_double(get(key));
    } catch (const IoError & e) {
        throw ConfigError("config key '" + key + "': " + e.what());
    }
}

int Config::get_int(const std::string & key) const {
    const double v = get_double(key);
    const int    i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
        throw ConfigError("config key '" + key + "' must be an integer");
    }
    return i;
}

std::uint64_t Config::get_u64(const std::string & key) const {
    try {
        return std::stoull(get(key));
    } catch (const std::exception &) {
        throw ConfigError("config key '" + key + "' must be an unsigned integer");
    }
}

void Config::set(const std::string & key, const std::string & value) {
    values_[key] = value;
}

void Config::apply_override(const std::string & assignment) {
    const size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override must look like section.key=value: '" + assignment + "'");
    }
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

namespace {

RejectionMode mode_from_name(const std::string & name, int radius) {
    if (name == "raster_scan") {
        return RejectionMode::raster_scan();
    }
    if (name == "local_naive") {
        return RejectionMode::local_naive();
    }
    if (name == "local_expand") {
        return RejectionMode::local_expand(radius);
    }
    throw ConfigError("unknown rejection mode '" + name + "'");
}

std::vector<std::string> split_csv(const std::string & text) {
    std::vector<std::string> out;
    std::istringstream       in(text);
    std::string              field;
    while (std::getline(in, field, ',')) {
        out.push_back(trim(field));
    }
    return out;
}

}  // namespace

RunSpec run_spec_from_config(const Config & raw) {
    // Missing keys fall back to the documented defaults.
    Config config = Config::defaults();
    for (const auto & [key, value] : raw.values()) {
        config.set(key, value);
    }

    RunSpec spec;
    spec.grid = GridShape{ config.get_int("grid.height"), config.get_int("grid.width") };
    validate_shape(spec.grid);
    spec.vocab = config.get_int("grid.vocab");
    if (spec.vocab < 2) {
        throw ConfigError("grid.vocab must be >= 2");
    }
    spec.codebook_dim  = config.get_int("codebook.dim");
    spec.codebook_seed = config.get_u64("codebook.seed");

    spec.model_seed   = config.get_u64("models.model_seed");
    spec.temperature  = config.get_double("models.temperature");
    spec.noise        = config.get_double("models.noise");
    spec.drafter_seed = config.get_u64("models.drafter_seed");
    spec.sampler_seed = config.get_u64("models.sampler_seed");

    DecodeConfig & d = spec.decode;
    d.decoder        = decoder_from_name(config.get("decode.decoder"));
    d.resolution_ratio  = config.get_int("decode.r");
    d.draft_window_rows = config.get_int("decode.draft_window_rows");
    d.seed              = config.get_u64("decode.seed");
    d.mode = mode_from_name(config.get("decode.mode"), config.get_int("decode.radius"));

    const int    k     = std::min(config.get_int("decode.k"), spec.vocab);
    const double delta = config.get_double("decode.delta");
    const double tau   = config.get_double("decode.tau");
    switch (d.decoder) {
        case DecoderKind::kBaseline:
        case DecoderKind::kSpecDec:
            d.rule = AcceptanceRule::exact();
            break;
        case DecoderKind::kLantern:
            d.rule = AcceptanceRule::pooled_ratio(k, delta);
            break;
        case DecoderKind::kMultiScale:
            d.rule = AcceptanceRule::pooled_threshold(k, delta, tau);
            break;
    }
    d.rule.validate(spec.vocab);

    if (d.decoder == DecoderKind::kSpecDec || d.decoder == DecoderKind::kLantern) {
        if (d.resolution_ratio != 1) {
            throw ConfigError("decode.r must be 1 for this decoder");
        }
    }
    if (d.decoder == DecoderKind::kMultiScale) {
        if (d.resolution_ratio < 2) {
            throw ConfigError("decode.r must be >= 2 for multi-scale decoding");
        }
        if (spec.grid.height % d.resolution_ratio != 0 ||
            spec.grid.width % d.resolution_ratio != 0) {
            throw ConfigError("grid dimensions must be divisible by decode.r");
        }
    }

    spec.cond = Conditioning{ config.get_int("decode.conditioning") };
    if (spec.cond.seed_token < 0 || spec.cond.seed_token >= spec.vocab) {
        throw ConfigError("decode.conditioning must be a valid token id");
    }

    spec.cost.c_seq               = config.get_double("cost.c_seq");
    spec.cost.c_par               = config.get_double("cost.c_par");
    spec.cost.c_resample_overhead = config.get_double("cost.c_resample_overhead");

    spec.bench_axis   = config.get("bench.axis");
    spec.bench_values = split_csv(config.get("bench.values"));
    spec.bench_seeds  = config.get_int("bench.seeds");
    if (spec.bench_seeds < 1) {
        throw ConfigError("bench.seeds must be >= 1");
    }

    spec.verify_exactness_seeds = config.get_int("verify.exactness_seeds");
    spec.verify_tuple_count     = config.get_int("verify.tuple_count");
    return spec;
}

}  // namespace specgrid
