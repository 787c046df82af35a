// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "specgrid/config.hpp"
#include "specgrid/models.hpp"
#include "specgrid/verify.hpp"

namespace specgrid {

// Toy assets on disk: the target model, derived drafters per resolution
// ratio, the codebook, and the block templates.
struct AssetBundle {
    ToyMarkovModel               target;
    Codebook                     codebook;
    std::map<int, ToyMarkovModel> drafters;  // keyed by r
    std::vector<ToyBlockSampler> samplers;

    const ToyBlockSampler & sampler_for(int factor) const;
};

// Writes target.toymodel, drafter_r2.toymodel, drafter_r4.toymodel,
// codebook.csv and samplers.blocks into out_dir. Deterministic: re-running
// with the same config produces byte-identical files.
void cmd_gen_models(const Config & config, const std::string & out_dir);

AssetBundle load_assets(const Config & config, const std::string & assets_dir);

// Runs the configured decoder once; writes trace.json and summary.json.
void cmd_decode(const Config & config, const std::string & assets_dir,
                const std::string & out_dir);

// Sweeps one axis over a seed ensemble; writes bench.csv (one row per
// operating point) and bench_meta.json (the effective config).
void cmd_bench(const Config & config, const std::string & assets_dir,
               const std::string & out_dir);

// Runs the oracle-backed verification suite; writes verify_report.json and
// prints one line per check. Returns true when every check passed.
bool cmd_verify(const Config & config, const std::string & out_dir);

}  // namespace specgrid
