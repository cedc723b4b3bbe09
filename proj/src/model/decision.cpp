#include "drbac/model/decision.h"

namespace drbac::cost {

void to_json(nlohmann::json& j, const CostReceipt& receipt) {
  j = nlohmann::json{
      {"compares", receipt.compares}, {"hashes", receipt.hashes}, {"reads", receipt.reads},
      {"total", receipt.total},       {"writes", receipt.writes},
  };
}

}  // namespace drbac::cost

namespace drbac::model {

std::string_view decision_reason_name(DecisionReason reason) {
  switch (reason) {
    case DecisionReason::Matched: return "matched";
    case DecisionReason::NoRoleIntersection: return "no_role_intersection";
    case DecisionReason::ThresholdNotMet: return "threshold_not_met";
    case DecisionReason::UnknownUser: return "unknown_user";
    case DecisionReason::UnknownFunction: return "unknown_function";
    case DecisionReason::InactiveUser: return "inactive_user";
  }
  return "no_role_intersection";
}

Result<DecisionReason> decision_reason_from_name(std::string_view name) {
  if (name == "matched") return DecisionReason::Matched;
  if (name == "no_role_intersection") return DecisionReason::NoRoleIntersection;
  if (name == "threshold_not_met") return DecisionReason::ThresholdNotMet;
  if (name == "unknown_user") return DecisionReason::UnknownUser;
  if (name == "unknown_function") return DecisionReason::UnknownFunction;
  if (name == "inactive_user") return DecisionReason::InactiveUser;
  return make_error(ErrorCode::ParseError, "unknown decision reason: " + std::string(name));
}

void to_json(nlohmann::json& j, const Decision& decision) {
  j = nlohmann::json{
      {"allowed", decision.allowed},
      {"cost", decision.cost},
      {"matched_roles", decision.matched_roles},
      {"reason", std::string(decision_reason_name(decision.reason))},
  };
}

}  // namespace drbac::model
