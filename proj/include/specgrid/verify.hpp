// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specgrid/oracle.hpp"

namespace specgrid {

// One oracle-backed check: what was measured, against which threshold.
struct CheckResult {
    std::string name;
    bool        passed  = false;
    bool        skipped = false;  // instance refused by the enumeration guard
    double      measured  = 0.0;
    double      threshold = 0.0;
    std::string detail;
};

struct VerifyOptions {
    int          exactness_seeds = 20;   // random model seeds for the exactness sweep
    int          tuple_count     = 1000; // random tuples for the static TVD bound
    int          reduction_seeds = 100;  // seeds for the trace-identity reductions
    int          ensemble_seeds  = 200;  // seeds per operating point in the ablation suite
    std::int64_t branch_limit    = kDefaultBranchLimit;
};

// The full distributional verification suite. Every check is deterministic:
// fixed instance families, fixed seeds.
std::vector<CheckResult> run_verification(const VerifyOptions & options);

bool all_passed(const std::vector<CheckResult> & results);

std::string verification_report_json(const std::vector<CheckResult> & results);

}  // namespace specgrid
