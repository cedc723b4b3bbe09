#pragma once

#include <set>
#include <string>

#include "drbac/cost/receipt.h"
#include "drbac/engine/state.h"

namespace drbac::cost {

// One-time deployment cost of the dynamic engine: a single contract whose
// role/user/policy data lives in storage, so the figure depends on neither the
// role count nor how many times the logic has been upgraded.
CostUnits deployment_cost_dynamic(const CostSchedule& schedule, std::uint64_t n_roles,
                                  std::uint64_t n_upgrades);

// Modifier-style baseline: every role is compiled in, so each of the
// n_upgrades redeployments pays the per-role cost again. n_upgrades ≥ 1.
CostUnits deployment_cost_static(const CostSchedule& schedule, std::uint64_t n_roles,
                                 std::uint64_t n_upgrades);

// Simulated per-check cost of the baseline: a compiled-in modifier walks every
// role it knows about, so reads and compares both grow with the role count.
struct StaticBaselineModel {
  std::set<std::string> roles;
  CostUnits per_role_contract_cost = 0;
  bool per_upgrade_redeploy = true;

  CostReceipt check_cost(const CostSchedule& schedule) const;

  // Every upgrade redeploys the whole contract, paying for each compiled-in
  // role again.
  CostUnits deployment_cost(std::uint64_t n_upgrades) const;
};

// Meters one authorization check against the given state: the receipt counts
// the storage reads and role compares the check actually performed.
CostReceipt meter_check(const engine::EngineState& state, const std::string& user_id,
                        const std::string& function_id, const CostSchedule& schedule);

}  // namespace drbac::cost
