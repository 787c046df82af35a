// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "specgrid/engine.hpp"
#include "specgrid/metrics.hpp"

namespace specgrid {

// Flat key=value store with [section] grouping; keys are "section.key".
// Parsing and writing round-trip without loss.
class Config {
  public:
    static Config defaults();

    static Config parse_text(const std::string & text);
    static Config load(const std::string & path);

    std::string to_text() const;
    void        save(const std::string & path) const;

    bool has(const std::string & key) const { return values_.count(key) > 0; }

    const std::string & get(const std::string & key) const;
    std::string         get_or(const std::string & key, const std::string & fallback) const;

    double        get_double(const std::string & key) const;
    int           get_int(const std::string & key) const;
    std::uint64_t get_u64(const std::string & key) const;

    void set(const std::string & key, const std::string & value);

    // "section.key=value" override, as passed on the command line.
    void apply_override(const std::string & assignment);

    const std::map<std::string, std::string> & values() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
};

// Assembled run parameters (models come from asset files or are derived).
struct RunSpec {
    GridShape     grid{ 16, 16 };
    int           vocab        = 16;
    int           codebook_dim = 4;
    std::uint64_t codebook_seed = 7;

    std::uint64_t model_seed  = 1;
    double        temperature = 1.0;
    double        noise       = 0.4;
    std::uint64_t drafter_seed = 2;
    std::uint64_t sampler_seed = 3;

    DecodeConfig decode;
    Conditioning cond;
    CostModel    cost;

    std::string              bench_axis = "tau";
    std::vector<std::string> bench_values;
    int                      bench_seeds = 200;

    std::int64_t verify_exactness_seeds = 20;
    std::int64_t verify_tuple_count     = 1000;
};

// Builds the run spec from a config, applying the documented defaults and
// validating decoder/parameter consistency. k is clamped to min(k, V).
RunSpec run_spec_from_config(const Config & config);

}  // namespace specgrid
