#pragma once

#include <nlohmann/json.hpp>

#include <string_view>

#include "drbac/cost/receipt.h"
#include "drbac/model/ids.h"

namespace drbac::model {

enum class DecisionReason {
  Matched,
  NoRoleIntersection,
  ThresholdNotMet,
  UnknownUser,
  UnknownFunction,
  InactiveUser,
};

std::string_view decision_reason_name(DecisionReason reason);
Result<DecisionReason> decision_reason_from_name(std::string_view name);

struct Decision {
  bool allowed = false;
  DecisionReason reason = DecisionReason::NoRoleIntersection;
  RoleIdSet matched_roles;  // always the computed r_i ∩ r_j
  cost::CostReceipt cost;
};

void to_json(nlohmann::json& j, const Decision& decision);

}  // namespace drbac::model
