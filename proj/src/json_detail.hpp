// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "json.hpp"
#include "specgrid/engine.hpp"

namespace specgrid::detail {

nlohmann::json rule_to_json(const AcceptanceRule & rule);
nlohmann::json mode_to_json(const RejectionMode & mode);
nlohmann::json config_to_json(const DecodeConfig & config);

}  // namespace specgrid::detail
