#pragma once

#include <string_view>

#include <nlohmann/json.hpp>

#include "drbac/engine/state.h"
#include "drbac/result.h"

namespace drbac::store::logic_v2 {

// Second-generation transition function. Written independently of the v1
// managers (table-driven, validates payloads up front) but required to land on
// the same state for every event the v1 logic accepts — that equivalence is
// what lets a deployment swap logic versions without rewriting its log.
Result<void> apply_operation_v2(engine::EngineState& state, std::string_view operation,
                                const nlohmann::json& payload);

}  // namespace drbac::store::logic_v2
