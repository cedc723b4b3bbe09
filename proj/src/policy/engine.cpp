#include "drbac/policy/engine.h"

namespace drbac::policy {

using model::Decision;
using model::DecisionReason;

Decision evaluate(const EvaluationInput& input, const cost::CostSchedule& schedule,
                  cost::CostCounter counter) {
  Decision decision;
  decision.matched_roles = model::role_intersection(input.user_roles, input.function_roles);

  if (!input.user_known) {
    decision.allowed = false;
    decision.reason = DecisionReason::UnknownUser;
    decision.cost = counter.finalize(schedule);
    return decision;
  }
  if (!input.function_known) {
    decision.allowed = false;
    decision.reason = DecisionReason::UnknownFunction;
    decision.cost = counter.finalize(schedule);
    return decision;
  }
  if (!input.user_active) {
    decision.allowed = false;
    decision.reason = DecisionReason::InactiveUser;
    decision.cost = counter.finalize(schedule);
    return decision;
  }

  counter.add_compares(input.function_roles.size());
  if (input.mode.is_any_of()) {
    decision.allowed = !decision.matched_roles.empty();
    decision.reason =
        decision.allowed ? DecisionReason::Matched : DecisionReason::NoRoleIntersection;
  } else {
    counter.add_compares(1);
    decision.allowed = decision.matched_roles.size() >= input.mode.threshold();
    if (decision.allowed) {
      decision.reason = DecisionReason::Matched;
    } else {
      decision.reason = decision.matched_roles.empty() ? DecisionReason::NoRoleIntersection
                                                       : DecisionReason::ThresholdNotMet;
    }
  }
  decision.cost = counter.finalize(schedule);
  return decision;
}

Decision evaluate(const EvaluationInput& input) {
  return evaluate(input, cost::CostSchedule{}, cost::CostCounter{});
}

std::vector<Decision> evaluate_batch(std::span<const EvaluationInput> inputs) {
  std::vector<Decision> out;
  out.reserve(inputs.size());
  for (const EvaluationInput& input : inputs) {
    out.push_back(evaluate(input));
  }
  return out;
}

}  // namespace drbac::policy
