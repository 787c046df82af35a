// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "specgrid/engine.hpp"

namespace specgrid {

// Abstract latency units. One sequential forward pass costs c_seq for target
// and drafter alike; a batched verification call costs c_par regardless of
// window length; each up/down-sampler call costs c_resample_overhead.
struct CostModel {
    double c_seq               = 1.0;
    double c_par               = 1.0;
    double c_resample_overhead = 0.05;

    static CostModel nfe_only() { return CostModel{ 1.0, 0.0, 0.0 }; }

    bool operator==(const CostModel &) const = default;
};

// Where the simulated cost went, as fractions summing to 1.
struct CostFractions {
    double draft    = 0.0;  // sequential drafter sampling
    double verify   = 0.0;  // parallel verification calls
    double resample = 0.0;  // sequential target resampling
    double samplers = 0.0;  // up/down-sampler overhead
};

struct RunSummary {
    DecodeConfig  config;
    CostModel     cost;
    TraceCounters counters;
    int           generated = 0;  // T_p: tokens this run produced

    // Fraction of drafted tokens the verifier accepted.
    double acceptance_rate = 0.0;
    // 1 - (sequential target resamples / T_p): the fraction of positions that
    // kept their draft. Local expansion makes this differ from
    // acceptance_rate, which is exactly the cost of the mechanism.
    double a_effective = 0.0;

    double simulated_cost      = 0.0;
    double baseline_cost       = 0.0;
    double measured_speedup    = 0.0;
    double theoretical_speedup = 0.0;
    // |measured - theoretical| / theoretical.
    double deviation = 0.0;

    CostFractions fractions;
};

// S_T = T_p / ((1 - a) * T_p + T_q).
double theoretical_speedup(double target_tokens, double draft_tokens, double acceptance_rate);

RunSummary summarize(const DecodeTrace & trace, const CostModel & cost);

// Relative gap between the measured speedup and the theoretical formula,
// evaluated either with the decision-based acceptance rate or with
// a_effective. Under a pure-NFE cost model (c_par = 0, zero overhead) the
// a_effective variant is an exact identity.
double consistency_deviation(const RunSummary & summary, bool use_effective);

std::string summary_to_json(const RunSummary & summary);
void        save_summary(const std::string & path, const RunSummary & summary);

}  // namespace specgrid
