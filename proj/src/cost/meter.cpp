#include "drbac/cost/meter.h"

#include "drbac/engine/managers.h"

namespace drbac::cost {

CostUnits deployment_cost_dynamic(const CostSchedule& schedule, std::uint64_t n_roles,
                                  std::uint64_t n_upgrades) {
  (void)n_roles;
  (void)n_upgrades;
  return schedule.deploy_base_dynamic;
}

CostUnits deployment_cost_static(const CostSchedule& schedule, std::uint64_t n_roles,
                                 std::uint64_t n_upgrades) {
  return schedule.deploy_base_static * n_roles * n_upgrades;
}

CostReceipt StaticBaselineModel::check_cost(const CostSchedule& schedule) const {
  CostCounter counter;
  counter.add_reads(roles.size());
  counter.add_compares(roles.size());
  return counter.finalize(schedule);
}

CostUnits StaticBaselineModel::deployment_cost(std::uint64_t n_upgrades) const {
  return per_role_contract_cost * roles.size() * n_upgrades;
}

CostReceipt meter_check(const engine::EngineState& state, const std::string& user_id,
                        const std::string& function_id, const CostSchedule& schedule) {
  return engine::permissions_manager::check_authorization(state, user_id, function_id, schedule)
      .cost;
}

}  // namespace drbac::cost
