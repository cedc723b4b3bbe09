#include "drbac/engine/managers.h"

#include <algorithm>

#include "drbac/engine/import.h"
#include "drbac/policy/engine.h"

namespace drbac::engine {

// ── role manager ────────────────────────────────────────────────────────────

namespace role_manager {

Result<void> check_add(const EngineState& state, const model::Role& role) {
  if (state.roles.contains(role.id.value())) {
    return make_error(ErrorCode::DuplicateRole, "role already exists: " + role.id.value(),
                      {{"id", role.id.value()}});
  }
  return {};
}

void apply_add(EngineState& state, model::Role role) {
  const std::string id = role.id.value();
  state.roles.insert_or_assign(id, std::move(role));
}

Result<void> check_update(const EngineState& state, const std::string& role_id) {
  if (!state.roles.contains(role_id)) {
    return make_error(ErrorCode::RoleNotFound, "role not found: " + role_id, {{"id", role_id}});
  }
  return {};
}

void apply_update(EngineState& state, const std::string& role_id, std::string description,
                  model::Metadata metadata) {
  auto& role = state.roles.at(role_id);
  role.description = std::move(description);
  role.metadata = std::move(metadata);
}

Result<void> check_remove(const EngineState& state, const std::string& role_id) {
  if (!state.roles.contains(role_id)) {
    return make_error(ErrorCode::RoleNotFound, "role not found: " + role_id, {{"id", role_id}});
  }
  const auto users = users_holding_role(state, role_id);
  const auto functions = functions_requiring_role(state, role_id);
  if (!users.empty() || !functions.empty()) {
    return make_error(ErrorCode::RoleInUse, "role is referenced and cannot be removed: " + role_id,
                      {{"functions", functions}, {"id", role_id}, {"users", users}});
  }
  return {};
}

void apply_remove(EngineState& state, const std::string& role_id) {
  state.roles.erase(role_id);
}

bool exists(const EngineState& state, const std::string& role_id) {
  return state.roles.contains(role_id);
}

Result<model::Role> get(const EngineState& state, const std::string& role_id) {
  const auto it = state.roles.find(role_id);
  if (it == state.roles.end()) {
    return make_error(ErrorCode::RoleNotFound, "role not found: " + role_id, {{"id", role_id}});
  }
  return it->second;
}

std::vector<model::Role> list(const EngineState& state) {
  std::vector<model::Role> out;
  out.reserve(state.roles.size());
  for (const auto& [_, role] : state.roles) {
    out.push_back(role);
  }
  return out;
}

}  // namespace role_manager

// ── function manager ────────────────────────────────────────────────────────

namespace function_manager {

Result<void> check_register(const EngineState& state, const model::FunctionDef& fn) {
  if (state.functions.contains(fn.id.value())) {
    return make_error(ErrorCode::DuplicateFunction, "function already exists: " + fn.id.value(),
                      {{"id", fn.id.value()}});
  }
  for (const auto& [id, existing] : state.functions) {
    if (existing.target_contract == fn.target_contract &&
        existing.function_name == fn.function_name) {
      return make_error(ErrorCode::DuplicateFunction,
                        "function signature already registered: " + fn.target_contract + "." +
                            fn.function_name,
                        {{"existing_id", id},
                         {"function_name", fn.function_name},
                         {"target_contract", fn.target_contract}});
    }
  }
  return {};
}

void apply_register(EngineState& state, model::FunctionDef fn) {
  const std::string id = fn.id.value();
  state.functions.insert_or_assign(id, std::move(fn));
}

Result<void> check_remove(const EngineState& state, const std::string& function_id) {
  if (!state.functions.contains(function_id)) {
    return make_error(ErrorCode::FunctionNotFound, "function not found: " + function_id,
                      {{"id", function_id}});
  }
  const auto it = state.policies.find(function_id);
  if (it != state.policies.end()) {
    return make_error(ErrorCode::FunctionInUse,
                      "function has a policy and cannot be removed: " + function_id,
                      {{"id", function_id}, {"required_roles", it->second.required_roles}});
  }
  return {};
}

void apply_remove(EngineState& state, const std::string& function_id) {
  state.functions.erase(function_id);
}

bool exists(const EngineState& state, const std::string& function_id) {
  return state.functions.contains(function_id);
}

Result<model::FunctionDef> get(const EngineState& state, const std::string& function_id) {
  const auto it = state.functions.find(function_id);
  if (it == state.functions.end()) {
    return make_error(ErrorCode::FunctionNotFound, "function not found: " + function_id,
                      {{"id", function_id}});
  }
  return it->second;
}

std::vector<model::FunctionDef> list(const EngineState& state) {
  std::vector<model::FunctionDef> out;
  out.reserve(state.functions.size());
  for (const auto& [_, fn] : state.functions) {
    out.push_back(fn);
  }
  return out;
}

}  // namespace function_manager

// ── user manager ────────────────────────────────────────────────────────────

namespace user_manager {

Result<void> check_add(const EngineState& state, const model::User& user) {
  if (state.users.contains(user.id.value())) {
    return make_error(ErrorCode::DuplicateUser, "user already exists: " + user.id.value(),
                      {{"id", user.id.value()}});
  }
  if (user.external_ref) {
    for (const auto& [id, existing] : state.users) {
      if (existing.external_ref == user.external_ref) {
        return make_error(ErrorCode::DuplicateExternalRef,
                          "external_ref already bound to user " + id,
                          {{"external_ref", *user.external_ref}, {"existing_id", id}});
      }
    }
  }
  return {};
}

void apply_add(EngineState& state, model::User user) {
  const std::string id = user.id.value();
  state.users.insert_or_assign(id, std::move(user));
}

Result<void> check_remove(const EngineState& state, const std::string& user_id) {
  if (!state.users.contains(user_id)) {
    return make_error(ErrorCode::UserNotFound, "user not found: " + user_id, {{"id", user_id}});
  }
  const auto it = state.user_roles.find(user_id);
  if (it != state.user_roles.end() && !it->second.empty()) {
    return make_error(ErrorCode::UserHasRoles,
                      "user still holds roles; revoke them first: " + user_id,
                      {{"id", user_id}, {"roles", it->second}});
  }
  return {};
}

void apply_remove(EngineState& state, const std::string& user_id) {
  state.users.erase(user_id);
}

Result<void> check_set_active(const EngineState& state, const std::string& user_id) {
  if (!state.users.contains(user_id)) {
    return make_error(ErrorCode::UserNotFound, "user not found: " + user_id, {{"id", user_id}});
  }
  return {};
}

void apply_set_active(EngineState& state, const std::string& user_id, bool active) {
  state.users.at(user_id).active = active;
}

Result<void> check_assign(const EngineState& state, const std::string& user_id,
                          const std::string& role_id) {
  if (!state.users.contains(user_id)) {
    return make_error(ErrorCode::UserNotFound, "user not found: " + user_id, {{"id", user_id}});
  }
  if (!state.roles.contains(role_id)) {
    return make_error(ErrorCode::RoleNotFound, "role not found: " + role_id, {{"id", role_id}});
  }
  const auto it = state.user_roles.find(user_id);
  if (it != state.user_roles.end() && it->second.contains(role_id)) {
    return make_error(ErrorCode::DuplicateAssignment,
                      "user " + user_id + " already holds role " + role_id,
                      {{"role_id", role_id}, {"user_id", user_id}});
  }
  return {};
}

void apply_assign(EngineState& state, const std::string& user_id, const std::string& role_id) {
  state.user_roles[user_id].insert(role_id);
}

Result<void> check_revoke(const EngineState& state, const std::string& user_id,
                          const std::string& role_id) {
  if (!state.users.contains(user_id)) {
    return make_error(ErrorCode::UserNotFound, "user not found: " + user_id, {{"id", user_id}});
  }
  if (!state.roles.contains(role_id)) {
    return make_error(ErrorCode::RoleNotFound, "role not found: " + role_id, {{"id", role_id}});
  }
  const auto it = state.user_roles.find(user_id);
  if (it == state.user_roles.end() || !it->second.contains(role_id)) {
    return make_error(ErrorCode::AssignmentNotFound,
                      "user " + user_id + " does not hold role " + role_id,
                      {{"role_id", role_id}, {"user_id", user_id}});
  }
  return {};
}

void apply_revoke(EngineState& state, const std::string& user_id, const std::string& role_id) {
  const auto it = state.user_roles.find(user_id);
  it->second.erase(role_id);
  if (it->second.empty()) {
    state.user_roles.erase(it);
  }
}

Result<model::RoleIdSet> get_user_roles(const EngineState& state, const std::string& user_id) {
  if (!state.users.contains(user_id)) {
    return make_error(ErrorCode::UserNotFound, "user not found: " + user_id, {{"id", user_id}});
  }
  const auto it = state.user_roles.find(user_id);
  return it == state.user_roles.end() ? model::RoleIdSet{} : it->second;
}

bool exists(const EngineState& state, const std::string& user_id) {
  return state.users.contains(user_id);
}

Result<model::User> get(const EngineState& state, const std::string& user_id) {
  const auto it = state.users.find(user_id);
  if (it == state.users.end()) {
    return make_error(ErrorCode::UserNotFound, "user not found: " + user_id, {{"id", user_id}});
  }
  return it->second;
}

std::vector<model::User> list(const EngineState& state) {
  std::vector<model::User> out;
  out.reserve(state.users.size());
  for (const auto& [_, user] : state.users) {
    out.push_back(user);
  }
  return out;
}

}  // namespace user_manager

// ── policy manager ──────────────────────────────────────────────────────────

namespace policy_manager {

Result<void> check_bind(const EngineState& state, const std::string& function_id,
                        const std::string& role_id) {
  if (!state.functions.contains(function_id)) {
    return make_error(ErrorCode::FunctionNotFound, "function not found: " + function_id,
                      {{"id", function_id}});
  }
  if (!state.roles.contains(role_id)) {
    return make_error(ErrorCode::RoleNotFound, "role not found: " + role_id, {{"id", role_id}});
  }
  const auto it = state.policies.find(function_id);
  if (it != state.policies.end() && it->second.required_roles.contains(role_id)) {
    return make_error(ErrorCode::DuplicateBinding,
                      "role " + role_id + " already bound to " + function_id,
                      {{"function_id", function_id}, {"role_id", role_id}});
  }
  return {};
}

void apply_bind(EngineState& state, const std::string& function_id, const std::string& role_id) {
  auto it = state.policies.find(function_id);
  if (it == state.policies.end()) {
    it = state.policies.emplace(function_id, Policy{function_id, {}, policy::PolicyMode::any_of()})
             .first;
  }
  it->second.required_roles.insert(role_id);
}

Result<void> check_unbind(const EngineState& state, const std::string& function_id,
                          const std::string& role_id) {
  if (!state.functions.contains(function_id)) {
    return make_error(ErrorCode::FunctionNotFound, "function not found: " + function_id,
                      {{"id", function_id}});
  }
  if (!state.roles.contains(role_id)) {
    return make_error(ErrorCode::RoleNotFound, "role not found: " + role_id, {{"id", role_id}});
  }
  const auto it = state.policies.find(function_id);
  if (it == state.policies.end() || !it->second.required_roles.contains(role_id)) {
    return make_error(ErrorCode::BindingNotFound,
                      "role " + role_id + " is not bound to " + function_id,
                      {{"function_id", function_id}, {"role_id", role_id}});
  }
  const Policy& policy = it->second;
  if (!policy.mode.is_any_of() &&
      policy.required_roles.size() - 1 < policy.mode.threshold()) {
    return make_error(ErrorCode::ThresholdViolation,
                      "unbinding would leave fewer roles than the m-of-p threshold",
                      {{"function_id", function_id},
                       {"m", policy.mode.threshold()},
                       {"remaining", policy.required_roles.size() - 1}});
  }
  return {};
}

void apply_unbind(EngineState& state, const std::string& function_id,
                  const std::string& role_id) {
  const auto it = state.policies.find(function_id);
  it->second.required_roles.erase(role_id);
  if (it->second.required_roles.empty()) {
    // Empty role sets only occur under AnyOf; the entry reverts to the
    // implicit default so the function is no longer "in use".
    state.policies.erase(it);
  }
}

Result<void> check_set_mode(const EngineState& state, const std::string& function_id,
                            const policy::PolicyMode& mode) {
  if (!state.functions.contains(function_id)) {
    return make_error(ErrorCode::FunctionNotFound, "function not found: " + function_id,
                      {{"id", function_id}});
  }
  if (!mode.is_any_of()) {
    const auto it = state.policies.find(function_id);
    const std::size_t bound = it == state.policies.end() ? 0 : it->second.required_roles.size();
    if (mode.threshold() < 1 || mode.threshold() > bound) {
      return make_error(ErrorCode::ThresholdViolation,
                        "m-of-p threshold must satisfy 1 <= m <= bound roles",
                        {{"bound_roles", bound}, {"function_id", function_id},
                         {"m", mode.threshold()}});
    }
  }
  return {};
}

void apply_set_mode(EngineState& state, const std::string& function_id,
                    const policy::PolicyMode& mode) {
  const auto it = state.policies.find(function_id);
  if (it == state.policies.end()) {
    // AnyOf on a function without a policy entry: already the default.
    return;
  }
  it->second.mode = mode;
}

Result<std::pair<model::RoleIdSet, policy::PolicyMode>> get_function_roles(
    const EngineState& state, const std::string& function_id) {
  if (!state.functions.contains(function_id)) {
    return make_error(ErrorCode::FunctionNotFound, "function not found: " + function_id,
                      {{"id", function_id}});
  }
  const auto it = state.policies.find(function_id);
  if (it == state.policies.end()) {
    return std::pair<model::RoleIdSet, policy::PolicyMode>{{}, policy::PolicyMode::any_of()};
  }
  return std::pair<model::RoleIdSet, policy::PolicyMode>{it->second.required_roles,
                                                         it->second.mode};
}

}  // namespace policy_manager

// ── permissions manager ─────────────────────────────────────────────────────

namespace permissions_manager {

namespace {

model::Decision run_check(const EngineState& state, const std::string& user_id,
                          const std::string& function_id, const model::RoleIdSet* extra_roles,
                          const cost::CostSchedule& schedule, TraceSink* sink) {
  trace(sink, "permissions_manager.check_authorization");
  cost::CostCounter counter;
  policy::EvaluationInput input;

  const auto finish = [&](const policy::EvaluationInput& in) {
    trace(sink, "policy_engine.evaluate");
    model::Decision decision = policy::evaluate(in, schedule, counter);
    trace(sink, decision.allowed ? "decision:allow" : "decision:deny");
    return decision;
  };

  counter.add_reads(1);
  const auto user_it = state.users.find(user_id);
  if (user_it == state.users.end()) {
    input.user_known = false;
    return finish(input);
  }
  counter.add_reads(1);
  if (!state.functions.contains(function_id)) {
    input.function_known = false;
    return finish(input);
  }
  if (!user_it->second.active) {
    // Denied before any role lookup.
    input.user_active = false;
    return finish(input);
  }

  trace(sink, "user_manager.get_user_roles");
  const auto roles_it = state.user_roles.find(user_id);
  if (roles_it != state.user_roles.end()) {
    input.user_roles = roles_it->second;
  }
  if (extra_roles != nullptr) {
    input.user_roles.insert(extra_roles->begin(), extra_roles->end());
  }
  counter.add_reads(input.user_roles.size());

  trace(sink, "policy_manager.get_function_roles");
  counter.add_reads(1);
  const auto policy_it = state.policies.find(function_id);
  if (policy_it != state.policies.end()) {
    input.function_roles = policy_it->second.required_roles;
    input.mode = policy_it->second.mode;
  }
  counter.add_reads(input.function_roles.size());

  return finish(input);
}

}  // namespace

model::Decision check_authorization(const EngineState& state, const std::string& user_id,
                                    const std::string& function_id,
                                    const cost::CostSchedule& schedule, TraceSink* sink) {
  return run_check(state, user_id, function_id, nullptr, schedule, sink);
}

model::Decision check_authorization_with(const EngineState& state, const std::string& user_id,
                                         const std::string& function_id,
                                         const model::RoleIdSet& extra_roles,
                                         const cost::CostSchedule& schedule, TraceSink* sink) {
  return run_check(state, user_id, function_id, &extra_roles, schedule, sink);
}

}  // namespace permissions_manager

// ── event application (v1 semantics) ────────────────────────────────────────

namespace {

Result<std::string> payload_string(const nlohmann::json& payload, const char* field) {
  if (!payload.is_object() || !payload.contains(field) || !payload[field].is_string()) {
    return make_error(ErrorCode::InvalidEvent,
                      std::string("payload missing string field '") + field + "'");
  }
  return payload[field].get<std::string>();
}

Result<void> check_import(const EngineState& state, const BulkImport& import) {
  std::set<std::string> seen_ids;
  std::set<std::string> seen_refs;
  std::size_t index = 1;
  for (const ImportEntry& entry : import.entries) {
    const std::string& id = entry.user.id.value();
    if (state.users.contains(id) || !seen_ids.insert(id).second) {
      return make_error(ErrorCode::DuplicateUserInImport, "user already exists: " + id,
                        {{"id", id}, {"line", index}});
    }
    if (entry.user.external_ref) {
      if (!seen_refs.insert(*entry.user.external_ref).second) {
        return make_error(ErrorCode::DuplicateUserInImport,
                          "external_ref repeated in import: " + *entry.user.external_ref,
                          {{"external_ref", *entry.user.external_ref}, {"line", index}});
      }
      for (const auto& [existing_id, existing] : state.users) {
        if (existing.external_ref == entry.user.external_ref) {
          return make_error(ErrorCode::DuplicateUserInImport,
                            "external_ref already bound to user " + existing_id,
                            {{"external_ref", *entry.user.external_ref}, {"line", index}});
        }
      }
    }
    for (const std::string& role : entry.roles) {
      if (!state.roles.contains(role)) {
        return make_error(ErrorCode::UnknownRoleInImport, "unknown role in import: " + role,
                          {{"line", index}, {"role", role}});
      }
    }
    ++index;
  }
  return {};
}

void apply_import(EngineState& state, const BulkImport& import) {
  for (const ImportEntry& entry : import.entries) {
    const std::string id = entry.user.id.value();
    user_manager::apply_add(state, entry.user);
    for (const std::string& role : entry.roles) {
      user_manager::apply_assign(state, id, role);
    }
  }
}

}  // namespace

Result<void> apply_operation(EngineState& state, std::string_view operation,
                             const nlohmann::json& payload) {
  Result<void> outcome = {};

  if (operation == ops::kRoleAdd) {
    auto role = model::role_from_json(payload);
    if (!role) return role.error();
    outcome = role_manager::check_add(state, role.value());
    if (outcome) role_manager::apply_add(state, std::move(role).value());
  } else if (operation == ops::kRoleUpdate) {
    auto role = model::role_from_json(payload);
    if (!role) return role.error();
    const std::string id = role.value().id.value();
    outcome = role_manager::check_update(state, id);
    if (outcome) {
      role_manager::apply_update(state, id, std::move(role.value().description),
                                 std::move(role.value().metadata));
    }
  } else if (operation == ops::kRoleRemove) {
    auto id = payload_string(payload, "id");
    if (!id) return id.error();
    outcome = role_manager::check_remove(state, id.value());
    if (outcome) role_manager::apply_remove(state, id.value());
  } else if (operation == ops::kFunctionRegister) {
    auto fn = model::function_from_json(payload);
    if (!fn) return fn.error();
    outcome = function_manager::check_register(state, fn.value());
    if (outcome) function_manager::apply_register(state, std::move(fn).value());
  } else if (operation == ops::kFunctionRemove) {
    auto id = payload_string(payload, "id");
    if (!id) return id.error();
    outcome = function_manager::check_remove(state, id.value());
    if (outcome) function_manager::apply_remove(state, id.value());
  } else if (operation == ops::kUserAdd) {
    auto user = model::user_from_json(payload);
    if (!user) return user.error();
    outcome = user_manager::check_add(state, user.value());
    if (outcome) user_manager::apply_add(state, std::move(user).value());
  } else if (operation == ops::kUserRemove) {
    auto id = payload_string(payload, "id");
    if (!id) return id.error();
    outcome = user_manager::check_remove(state, id.value());
    if (outcome) user_manager::apply_remove(state, id.value());
  } else if (operation == ops::kUserSetActive) {
    auto id = payload_string(payload, "id");
    if (!id) return id.error();
    if (!payload.contains("active") || !payload["active"].is_boolean()) {
      return make_error(ErrorCode::InvalidEvent, "payload missing boolean field 'active'");
    }
    outcome = user_manager::check_set_active(state, id.value());
    if (outcome) user_manager::apply_set_active(state, id.value(), payload["active"].get<bool>());
  } else if (operation == ops::kAssignRole) {
    auto user_id = payload_string(payload, "user_id");
    auto role_id = payload_string(payload, "role_id");
    if (!user_id) return user_id.error();
    if (!role_id) return role_id.error();
    outcome = user_manager::check_assign(state, user_id.value(), role_id.value());
    if (outcome) user_manager::apply_assign(state, user_id.value(), role_id.value());
  } else if (operation == ops::kRevokeRole) {
    auto user_id = payload_string(payload, "user_id");
    auto role_id = payload_string(payload, "role_id");
    if (!user_id) return user_id.error();
    if (!role_id) return role_id.error();
    outcome = user_manager::check_revoke(state, user_id.value(), role_id.value());
    if (outcome) user_manager::apply_revoke(state, user_id.value(), role_id.value());
  } else if (operation == ops::kPolicyBind) {
    auto function_id = payload_string(payload, "function_id");
    auto role_id = payload_string(payload, "role_id");
    if (!function_id) return function_id.error();
    if (!role_id) return role_id.error();
    outcome = policy_manager::check_bind(state, function_id.value(), role_id.value());
    if (outcome) policy_manager::apply_bind(state, function_id.value(), role_id.value());
  } else if (operation == ops::kPolicyUnbind) {
    auto function_id = payload_string(payload, "function_id");
    auto role_id = payload_string(payload, "role_id");
    if (!function_id) return function_id.error();
    if (!role_id) return role_id.error();
    outcome = policy_manager::check_unbind(state, function_id.value(), role_id.value());
    if (outcome) policy_manager::apply_unbind(state, function_id.value(), role_id.value());
  } else if (operation == ops::kPolicySetMode) {
    auto function_id = payload_string(payload, "function_id");
    if (!function_id) return function_id.error();
    if (!payload.contains("mode")) {
      return make_error(ErrorCode::InvalidEvent, "payload missing field 'mode'");
    }
    auto mode = policy::mode_from_json(payload["mode"]);
    if (!mode) return mode.error();
    outcome = policy_manager::check_set_mode(state, function_id.value(), mode.value());
    if (outcome) policy_manager::apply_set_mode(state, function_id.value(), mode.value());
  } else if (operation == ops::kUserImport) {
    auto import = import_from_payload(payload);
    if (!import) return import.error();
    outcome = check_import(state, import.value());
    if (outcome) apply_import(state, import.value());
  } else {
    return make_error(ErrorCode::UnknownOperation,
                      "unknown operation: " + std::string(operation),
                      {{"operation", std::string(operation)}});
  }

  if (!outcome) {
    return outcome;
  }
  state.version += 1;
  return {};
}

}  // namespace drbac::engine
