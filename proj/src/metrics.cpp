// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#include "specgrid/metrics.hpp"

#include <cmath>
#include <fstream>

#include "json_detail.hpp"

namespace specgrid {

double theoretical_speedup(double target_tokens, double draft_tokens, double acceptance_rate) {
    if (target_tokens < 1.0) {
        throw ParamError("theoretical_speedup needs T_p >= 1");
    }
    if (draft_tokens < 0.0) {
        throw ParamError("theoretical_speedup needs T_q >= 0");
    }
    if (acceptance_rate < 0.0 || acceptance_rate > 1.0) {
        throw ParamError("theoretical_speedup needs a in [0, 1]");
    }
    return target_tokens / ((1.0 - acceptance_rate) * target_tokens + draft_tokens);
}

RunSummary summarize(const DecodeTrace & trace, const CostModel & cost) {
    if (!trace.final_grid.complete()) {
        throw ContractError("summarize requires a completed decode trace");
    }
    if (cost.c_seq < 0.0 || cost.c_par < 0.0 || cost.c_resample_overhead < 0.0) {
        throw ParamError("cost model entries must be >= 0");
    }

    RunSummary s;
    s.config    = trace.config;
    s.cost      = cost;
    s.counters  = trace.counters;
    s.generated = trace.generated();

    std::int64_t drafted  = 0;
    std::int64_t accepted = 0;
    for (const IterationRecord & it : trace.iterations) {
        drafted += static_cast<std::int64_t>(it.draft_tokens.size());
        for (bool keep : it.accepted) {
            accepted += keep ? 1 : 0;
        }
    }
    s.acceptance_rate = drafted > 0 ? static_cast<double>(accepted) / static_cast<double>(drafted)
                                    : 0.0;
    s.a_effective =
        1.0 - static_cast<double>(trace.counters.target_seq_nfe) / static_cast<double>(s.generated);

    const double draft_cost    = cost.c_seq * static_cast<double>(trace.counters.draft_seq_nfe);
    const double verify_cost   = cost.c_par * static_cast<double>(trace.counters.target_parallel_calls);
    const double resample_cost = cost.c_seq * static_cast<double>(trace.counters.target_seq_nfe);
    const double sampler_cost  = cost.c_resample_overhead *
                                static_cast<double>(trace.counters.upsample_calls +
                                                    trace.counters.downsample_calls);

    s.simulated_cost = draft_cost + verify_cost + resample_cost + sampler_cost;
    s.baseline_cost  = cost.c_seq * static_cast<double>(s.generated);
    if (s.simulated_cost <= 0.0) {
        throw ContractError("simulated cost is zero; trace counters are incomplete");
    }
    s.measured_speedup = s.baseline_cost / s.simulated_cost;

    s.theoretical_speedup = theoretical_speedup(
        static_cast<double>(s.generated), static_cast<double>(trace.counters.draft_seq_nfe),
        s.acceptance_rate);
    s.deviation = std::abs(s.measured_speedup - s.theoretical_speedup) / s.theoretical_speedup;

    s.fractions.draft    = draft_cost / s.simulated_cost;
    s.fractions.verify   = verify_cost / s.simulated_cost;
    s.fractions.resample = resample_cost / s.simulated_cost;
    s.fractions.samplers = sampler_cost / s.simulated_cost;
    return s;
}

double consistency_deviation(const RunSummary & summary, bool use_effective) {
    const double a = use_effective ? summary.a_effective : summary.acceptance_rate;
    const double theoretical =
        theoretical_speedup(static_cast<double>(summary.generated),
                            static_cast<double>(summary.counters.draft_seq_nfe), a);
    return std::abs(summary.measured_speedup - theoretical) / theoretical;
}

namespace {

using nlohmann::json;

}  // namespace

std::string summary_to_json(const RunSummary & s) {
    json doc;
    doc["config"]               = detail::config_to_json(s.config);
    doc["config"]["cost_model"] = json{ { "c_seq", s.cost.c_seq },
                                        { "c_par", s.cost.c_par },
                                        { "c_resample_overhead", s.cost.c_resample_overhead } };
    doc["rng_algorithm"]   = RandomSource::kAlgorithm;
    doc["generated"]       = s.generated;
    doc["acceptance_rate"] = s.acceptance_rate;
    doc["a_effective"]     = s.a_effective;
    doc["counters"] = json{ { "draft_seq_nfe", s.counters.draft_seq_nfe },
                            { "target_seq_nfe", s.counters.target_seq_nfe },
                            { "target_parallel_calls", s.counters.target_parallel_calls },
                            { "downsample_calls", s.counters.downsample_calls },
                            { "upsample_calls", s.counters.upsample_calls } };
    doc["cost_fractions"] = json{ { "draft", s.fractions.draft },
                                  { "verify", s.fractions.verify },
                                  { "resample", s.fractions.resample },
                                  { "samplers", s.fractions.samplers } };
    doc["simulated_cost"]      = s.simulated_cost;
    doc["baseline_cost"]       = s.baseline_cost;
    doc["measured_speedup"]    = s.measured_speedup;
    doc["theoretical_speedup"] = s.theoretical_speedup;
    doc["deviation"]           = s.deviation;
    return doc.dump(2);
}

void save_summary(const std::string & path, const RunSummary & summary) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    out << summary_to_json(summary) << "\n";
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

}  // namespace specgrid
