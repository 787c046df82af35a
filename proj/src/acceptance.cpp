// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#include "specgrid/acceptance.hpp"

#include <algorithm>
#include <cmath>

namespace specgrid {

AcceptanceRule AcceptanceRule::exact() {
    return AcceptanceRule{ Kind::kExact, 1, 0.0, 0.0 };
}

AcceptanceRule AcceptanceRule::pooled_ratio(int k, double delta) {
    return AcceptanceRule{ Kind::kPooledRatio, k, delta, 0.0 };
}

AcceptanceRule AcceptanceRule::pooled_threshold(int k, double delta, double tau) {
    return AcceptanceRule{ Kind::kPooledThreshold, k, delta, tau };
}

void AcceptanceRule::validate(int vocab) const {
    if (kind == Kind::kExact) {
        return;
    }
    if (k < 1 || k > vocab) {
        throw ParamError("acceptance rule needs 1 <= k <= V");
    }
    if (delta < 0.0 || delta > 1.0) {
        throw ParamError("acceptance rule needs 0 <= delta <= 1");
    }
    if (kind == Kind::kPooledThreshold && tau < 0.0) {
        throw ParamError("acceptance rule needs tau >= 0");
    }
}

double exact_accept_prob(const Categorical & p, const Categorical & q, VocabId draft) {
    if (p.size() != q.size()) {
        throw ContractError("acceptance requires distributions over the same vocabulary");
    }
    if (draft < 0 || draft >= q.size()) {
        throw IndexError("draft token out of range");
    }
    const double qd = q[draft];
    if (qd <= 0.0) {
        throw ContractError("draft token has zero proposal mass");
    }
    return std::min(1.0, p[draft] / qd);
}

Categorical residual_distribution(const Categorical & p, const Categorical & q) {
    if (p.size() != q.size()) {
        throw ContractError("residual requires distributions over the same vocabulary");
    }
    std::vector<double> diff(static_cast<size_t>(p.size()));
    double              total = 0.0;
    for (int x = 0; x < p.size(); ++x) {
        diff[static_cast<size_t>(x)] = std::max(0.0, p.mass[static_cast<size_t>(x)] -
                                                         q.mass[static_cast<size_t>(x)]);
        total += diff[static_cast<size_t>(x)];
    }
    if (total <= 1e-12) {
        throw ContractError("degenerate residual: p equals q within tolerance");
    }
    for (double & d : diff) {
        d /= total;
    }
    return Categorical(std::move(diff));
}

NeighborhoodMass build_bounded_neighborhood(const Categorical & p, VocabId center,
                                            const Codebook & codebook, int k, double delta) {
    validate_categorical(p);
    if (p.size() != codebook.size()) {
        throw ContractError("distribution and codebook vocabulary sizes differ");
    }
    if (k < 1 || k > codebook.size()) {
        throw ParamError("build_bounded_neighborhood needs 1 <= k <= V");
    }
    if (delta < 0.0 || delta > 1.0) {
        throw ParamError("build_bounded_neighborhood needs 0 <= delta <= 1");
    }

    const std::vector<VocabId> order = nearest_neighbors(codebook, center, k);

    NeighborhoodMass out;
    out.center = center;
    out.members.push_back(center);
    out.pooled = p[center];
    out.moved  = 0.0;
    for (size_t i = 1; i < order.size(); ++i) {
        const double mass = p[order[i]];
        if (mass <= 0.0) {
            continue;
        }
        if (out.moved + mass <= delta) {
            out.members.push_back(order[i]);
            out.moved += mass;
            out.pooled += mass;
        }
    }
    return out;
}

Categorical relaxed_distribution(const Categorical & p, const NeighborhoodMass & neighborhood) {
    Categorical out = p;
    for (size_t i = 1; i < neighborhood.members.size(); ++i) {
        out.mass[static_cast<size_t>(neighborhood.members[i])] = 0.0;
    }
    out.mass[static_cast<size_t>(neighborhood.center)] = neighborhood.pooled;
    return out;
}

double pooled_ratio_accept_prob(const Categorical & q, VocabId draft,
                                const NeighborhoodMass & neighborhood) {
    if (neighborhood.center != draft) {
        throw ContractError("neighborhood was not built around the drafted token");
    }
    if (draft < 0 || draft >= q.size()) {
        throw IndexError("draft token out of range");
    }
    const double qd = q[draft];
    if (qd <= 0.0) {
        throw ContractError("draft token has zero proposal mass");
    }
    return std::min(1.0, neighborhood.pooled / qd);
}

bool threshold_accept(const NeighborhoodMass & neighborhood, double tau) {
    return neighborhood.pooled >= tau;
}

}  // namespace specgrid
