#pragma once

#include <span>
#include <vector>

#include "drbac/cost/receipt.h"
#include "drbac/model/decision.h"
#include "drbac/model/ids.h"
#include "drbac/policy/mode.h"

namespace drbac::policy {

struct EvaluationInput {
  model::RoleIdSet user_roles;      // r_i
  model::RoleIdSet function_roles;  // r_j
  PolicyMode mode = PolicyMode::any_of();
  bool user_active = true;
  bool user_known = true;
  bool function_known = true;
};

// Pure, total decision function.
//
// Deny precedence: unknown user, then unknown function, then inactive user,
// then the policy result. matched_roles is always the intersection of the
// input sets. AnyOf allows on a non-empty intersection; MOfP(m) allows when
// the intersection holds at least m roles. A deny distinguishes an empty
// intersection (NoRoleIntersection) from a non-empty one below the threshold
// (ThresholdNotMet).
//
// The counter accrues one compare per function role plus one for the
// threshold test under MOfP; callers may prime it with the storage reads that
// produced the input. The returned Decision prices the counter with the given
// schedule.
model::Decision evaluate(const EvaluationInput& input, const cost::CostSchedule& schedule,
                         cost::CostCounter counter);

model::Decision evaluate(const EvaluationInput& input);

// Element-wise evaluate, in order.
std::vector<model::Decision> evaluate_batch(std::span<const EvaluationInput> inputs);

}  // namespace drbac::policy
