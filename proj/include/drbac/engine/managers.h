#pragma once

#include <string>
#include <utility>
#include <vector>

#include "drbac/engine/state.h"
#include "drbac/engine/trace.h"
#include "drbac/model/decision.h"

namespace drbac::engine {

// The manager components operate on EngineState in two phases: check_*
// validates an operation against the current state without touching it, and
// apply_* performs the mutation unconditionally. The live write path runs
// check, persists the event, then applies; replay re-runs both through
// apply_operation below.

namespace role_manager {

Result<void> check_add(const EngineState& state, const model::Role& role);
void apply_add(EngineState& state, model::Role role);

Result<void> check_update(const EngineState& state, const std::string& role_id);
void apply_update(EngineState& state, const std::string& role_id, std::string description,
                  model::Metadata metadata);

// Rejected with RoleInUse while any user assignment or policy references the
// role; details list the referents.
Result<void> check_remove(const EngineState& state, const std::string& role_id);
void apply_remove(EngineState& state, const std::string& role_id);

bool exists(const EngineState& state, const std::string& role_id);
Result<model::Role> get(const EngineState& state, const std::string& role_id);
std::vector<model::Role> list(const EngineState& state);

}  // namespace role_manager

namespace function_manager {

Result<void> check_register(const EngineState& state, const model::FunctionDef& fn);
void apply_register(EngineState& state, model::FunctionDef fn);

Result<void> check_remove(const EngineState& state, const std::string& function_id);
void apply_remove(EngineState& state, const std::string& function_id);

bool exists(const EngineState& state, const std::string& function_id);
Result<model::FunctionDef> get(const EngineState& state, const std::string& function_id);
std::vector<model::FunctionDef> list(const EngineState& state);

}  // namespace function_manager

namespace user_manager {

Result<void> check_add(const EngineState& state, const model::User& user);
void apply_add(EngineState& state, model::User user);

Result<void> check_remove(const EngineState& state, const std::string& user_id);
void apply_remove(EngineState& state, const std::string& user_id);

Result<void> check_set_active(const EngineState& state, const std::string& user_id);
void apply_set_active(EngineState& state, const std::string& user_id, bool active);

Result<void> check_assign(const EngineState& state, const std::string& user_id,
                          const std::string& role_id);
void apply_assign(EngineState& state, const std::string& user_id, const std::string& role_id);

Result<void> check_revoke(const EngineState& state, const std::string& user_id,
                          const std::string& role_id);
void apply_revoke(EngineState& state, const std::string& user_id, const std::string& role_id);

// The range of user_id under U_R (the caller's r_i).
Result<model::RoleIdSet> get_user_roles(const EngineState& state, const std::string& user_id);

bool exists(const EngineState& state, const std::string& user_id);
Result<model::User> get(const EngineState& state, const std::string& user_id);
std::vector<model::User> list(const EngineState& state);

}  // namespace user_manager

namespace policy_manager {

Result<void> check_bind(const EngineState& state, const std::string& function_id,
                        const std::string& role_id);
void apply_bind(EngineState& state, const std::string& function_id, const std::string& role_id);

// Unbinding below an MOfP threshold is rejected with ThresholdViolation.
Result<void> check_unbind(const EngineState& state, const std::string& function_id,
                          const std::string& role_id);
void apply_unbind(EngineState& state, const std::string& function_id, const std::string& role_id);

Result<void> check_set_mode(const EngineState& state, const std::string& function_id,
                            const policy::PolicyMode& mode);
void apply_set_mode(EngineState& state, const std::string& function_id,
                    const policy::PolicyMode& mode);

// A function with no policy entry reads as ({}, AnyOf) and denies everyone.
Result<std::pair<model::RoleIdSet, policy::PolicyMode>> get_function_roles(
    const EngineState& state, const std::string& function_id);

}  // namespace policy_manager

namespace permissions_manager {

// Total decision function: unknown or inactive principals produce deny
// decisions, never errors. Read-only; the receipt counts the storage reads
// and compares on the evaluated path only.
model::Decision check_authorization(const EngineState& state, const std::string& user_id,
                                    const std::string& function_id,
                                    const cost::CostSchedule& schedule,
                                    TraceSink* sink = nullptr);

// Hypothetical variant: evaluates as if the user additionally held
// extra_roles. Shares the whole pipeline with check_authorization.
model::Decision check_authorization_with(const EngineState& state, const std::string& user_id,
                                         const std::string& function_id,
                                         const model::RoleIdSet& extra_roles,
                                         const cost::CostSchedule& schedule,
                                         TraceSink* sink = nullptr);

}  // namespace permissions_manager

// Mutating operation names as persisted in the ledger.
namespace ops {
inline constexpr std::string_view kRoleAdd = "role.add";
inline constexpr std::string_view kRoleUpdate = "role.update";
inline constexpr std::string_view kRoleRemove = "role.remove";
inline constexpr std::string_view kFunctionRegister = "function.register";
inline constexpr std::string_view kFunctionRemove = "function.remove";
inline constexpr std::string_view kUserAdd = "user.add";
inline constexpr std::string_view kUserRemove = "user.remove";
inline constexpr std::string_view kUserSetActive = "user.set_active";
inline constexpr std::string_view kAssignRole = "user.assign_role";
inline constexpr std::string_view kRevokeRole = "user.revoke_role";
inline constexpr std::string_view kPolicyBind = "policy.bind";
inline constexpr std::string_view kPolicyUnbind = "policy.unbind";
inline constexpr std::string_view kPolicySetMode = "policy.set_mode";
inline constexpr std::string_view kUserImport = "user.import";
}  // namespace ops

// Validates and applies one persisted operation to the state, bumping the
// version by exactly 1 on success. This is the v1 replay semantics and the
// live apply path; both go through the same code so they cannot drift.
Result<void> apply_operation(EngineState& state, std::string_view operation,
                             const nlohmann::json& payload);

}  // namespace drbac::engine
