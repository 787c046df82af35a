// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "specgrid/core.hpp"

namespace specgrid {

// How a verifier decides whether to keep a drafted token.
//
//   Exact:            accept with probability min(1, p(draft)/q(draft)).
//   PooledRatio:      as Exact, but the numerator pools the mass of a
//                      TVD-bounded codebook neighborhood of the draft.
//   PooledThreshold:  deterministic, accept iff the pooled mass >= tau.
struct AcceptanceRule {
    enum class Kind { kExact, kPooledRatio, kPooledThreshold };

    Kind   kind  = Kind::kExact;
    int    k     = 1;    // neighborhood cardinality (pooled variants)
    double delta = 0.0;  // TVD budget in [0, 1]
    double tau   = 0.0;  // pooled-mass threshold (PooledThreshold only)

    static AcceptanceRule exact();
    static AcceptanceRule pooled_ratio(int k, double delta);
    static AcceptanceRule pooled_threshold(int k, double delta, double tau);

    // Throws ParamError unless 1 <= k <= vocab and 0 <= delta <= 1 (pooled
    // variants) and tau >= 0.
    void validate(int vocab) const;

    bool operator==(const AcceptanceRule &) const = default;
};

// The TVD-bounded subset A of the draft's k nearest neighbors, together with
// its pooled target mass. `moved` is the mass that aggregation onto the
// center relocates, i.e. exactly the TVD between the relaxed distribution and
// the original.
struct NeighborhoodMass {
    VocabId              center = 0;
    std::vector<VocabId> members;  // center first, then accepted neighbors in distance order
    double               pooled = 0.0;  // sum of p over members
    double               moved  = 0.0;  // pooled - p(center), always <= delta
};

// Exact acceptance probability min(1, p(draft)/q(draft)).
// Requires q(draft) > 0 (the draft was sampled from q).
double exact_accept_prob(const Categorical & p, const Categorical & q, VocabId draft);

// norm(max(0, p - q)) elementwise. Throws ContractError("degenerate
// residual") when p == q within tolerance; callers must prove that case
// unreachable before asking.
Categorical residual_distribution(const Categorical & p, const Categorical & q);

// Greedy nearest-first construction of A: walk the k nearest neighbors of
// `center` in ascending distance order, admit a candidate iff its mass keeps
// `moved` within delta, skip otherwise and keep walking. Zero-mass candidates
// are skipped outright (pooling them is a no-op).
NeighborhoodMass build_bounded_neighborhood(const Categorical & p, VocabId center,
                                            const Codebook & codebook, int k, double delta);

// The relaxed distribution: members' mass aggregated onto the center,
// everything else untouched. tvd(relaxed, p) == moved by construction.
Categorical relaxed_distribution(const Categorical & p, const NeighborhoodMass & neighborhood);

// min(1, pooled / q(draft)); reduces to exact_accept_prob at k = 1.
double pooled_ratio_accept_prob(const Categorical & q, VocabId draft,
                                const NeighborhoodMass & neighborhood);

// Deterministic threshold rule: keep the draft iff pooled >= tau.
bool threshold_accept(const NeighborhoodMass & neighborhood, double tau);

}  // namespace specgrid
