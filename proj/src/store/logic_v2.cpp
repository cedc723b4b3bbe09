#include "drbac/store/logic_v2.h"

#include <functional>
#include <map>
#include <string>

#include "drbac/engine/import.h"
#include "drbac/model/entities.h"
#include "drbac/policy/mode.h"

namespace drbac::store::logic_v2 {
namespace {

using engine::EngineState;
using nlohmann::json;

Result<std::string> str_field(const json& payload, const char* field) {
  if (!payload.is_object() || !payload.contains(field) || !payload[field].is_string()) {
    return make_error(ErrorCode::InvalidEvent,
                      std::string("payload missing string field '") + field + "'");
  }
  return payload[field].get<std::string>();
}

Result<void> fail(ErrorCode code, std::string message, json details = json::object()) {
  return make_error(code, std::move(message), std::move(details));
}

Result<void> v2_role_add(EngineState& state, const json& payload) {
  auto role = model::role_from_json(payload);
  if (!role) return role.error();
  auto [it, inserted] = state.roles.try_emplace(role.value().id.value(), role.value());
  if (!inserted) {
    return fail(ErrorCode::DuplicateRole, "role already exists: " + it->first);
  }
  return {};
}

Result<void> v2_role_update(EngineState& state, const json& payload) {
  auto role = model::role_from_json(payload);
  if (!role) return role.error();
  const auto it = state.roles.find(role.value().id.value());
  if (it == state.roles.end()) {
    return fail(ErrorCode::RoleNotFound, "role not found: " + role.value().id.value());
  }
  it->second.description = role.value().description;
  it->second.metadata = role.value().metadata;
  return {};
}

Result<void> v2_role_remove(EngineState& state, const json& payload) {
  auto id = str_field(payload, "id");
  if (!id) return id.error();
  if (!state.roles.contains(id.value())) {
    return fail(ErrorCode::RoleNotFound, "role not found: " + id.value());
  }
  if (!engine::users_holding_role(state, id.value()).empty() ||
      !engine::functions_requiring_role(state, id.value()).empty()) {
    return fail(ErrorCode::RoleInUse, "role is referenced: " + id.value());
  }
  state.roles.erase(id.value());
  return {};
}

Result<void> v2_function_register(EngineState& state, const json& payload) {
  auto fn = model::function_from_json(payload);
  if (!fn) return fn.error();
  if (state.functions.contains(fn.value().id.value())) {
    return fail(ErrorCode::DuplicateFunction, "function already exists: " + fn.value().id.value());
  }
  for (const auto& [_, existing] : state.functions) {
    if (existing.target_contract == fn.value().target_contract &&
        existing.function_name == fn.value().function_name) {
      return fail(ErrorCode::DuplicateFunction, "function signature already registered");
    }
  }
  state.functions.emplace(fn.value().id.value(), std::move(fn).value());
  return {};
}

Result<void> v2_function_remove(EngineState& state, const json& payload) {
  auto id = str_field(payload, "id");
  if (!id) return id.error();
  if (!state.functions.contains(id.value())) {
    return fail(ErrorCode::FunctionNotFound, "function not found: " + id.value());
  }
  if (state.policies.contains(id.value())) {
    return fail(ErrorCode::FunctionInUse, "function has a policy: " + id.value());
  }
  state.functions.erase(id.value());
  return {};
}

Result<void> v2_user_add(EngineState& state, const json& payload) {
  auto user = model::user_from_json(payload);
  if (!user) return user.error();
  if (state.users.contains(user.value().id.value())) {
    return fail(ErrorCode::DuplicateUser, "user already exists: " + user.value().id.value());
  }
  if (user.value().external_ref) {
    for (const auto& [existing_id, existing] : state.users) {
      if (existing.external_ref == user.value().external_ref) {
        return fail(ErrorCode::DuplicateExternalRef,
                    "external_ref already bound to user " + existing_id);
      }
    }
  }
  state.users.emplace(user.value().id.value(), std::move(user).value());
  return {};
}

Result<void> v2_user_remove(EngineState& state, const json& payload) {
  auto id = str_field(payload, "id");
  if (!id) return id.error();
  if (!state.users.contains(id.value())) {
    return fail(ErrorCode::UserNotFound, "user not found: " + id.value());
  }
  const auto roles = state.user_roles.find(id.value());
  if (roles != state.user_roles.end() && !roles->second.empty()) {
    return fail(ErrorCode::UserHasRoles, "user still holds roles: " + id.value());
  }
  state.users.erase(id.value());
  return {};
}

Result<void> v2_user_set_active(EngineState& state, const json& payload) {
  auto id = str_field(payload, "id");
  if (!id) return id.error();
  if (!payload.contains("active") || !payload["active"].is_boolean()) {
    return fail(ErrorCode::InvalidEvent, "payload missing boolean field 'active'");
  }
  const auto it = state.users.find(id.value());
  if (it == state.users.end()) {
    return fail(ErrorCode::UserNotFound, "user not found: " + id.value());
  }
  it->second.active = payload["active"].get<bool>();
  return {};
}

Result<void> v2_assign_role(EngineState& state, const json& payload) {
  auto user_id = str_field(payload, "user_id");
  auto role_id = str_field(payload, "role_id");
  if (!user_id) return user_id.error();
  if (!role_id) return role_id.error();
  if (!state.users.contains(user_id.value())) {
    return fail(ErrorCode::UserNotFound, "user not found: " + user_id.value());
  }
  if (!state.roles.contains(role_id.value())) {
    return fail(ErrorCode::RoleNotFound, "role not found: " + role_id.value());
  }
  if (!state.user_roles[user_id.value()].insert(role_id.value()).second) {
    if (state.user_roles[user_id.value()].empty()) state.user_roles.erase(user_id.value());
    return fail(ErrorCode::DuplicateAssignment, "assignment already present");
  }
  return {};
}

Result<void> v2_revoke_role(EngineState& state, const json& payload) {
  auto user_id = str_field(payload, "user_id");
  auto role_id = str_field(payload, "role_id");
  if (!user_id) return user_id.error();
  if (!role_id) return role_id.error();
  if (!state.users.contains(user_id.value())) {
    return fail(ErrorCode::UserNotFound, "user not found: " + user_id.value());
  }
  if (!state.roles.contains(role_id.value())) {
    return fail(ErrorCode::RoleNotFound, "role not found: " + role_id.value());
  }
  const auto it = state.user_roles.find(user_id.value());
  if (it == state.user_roles.end() || it->second.erase(role_id.value()) == 0) {
    return fail(ErrorCode::AssignmentNotFound, "assignment not present");
  }
  if (it->second.empty()) state.user_roles.erase(it);
  return {};
}

Result<void> v2_policy_bind(EngineState& state, const json& payload) {
  auto function_id = str_field(payload, "function_id");
  auto role_id = str_field(payload, "role_id");
  if (!function_id) return function_id.error();
  if (!role_id) return role_id.error();
  if (!state.functions.contains(function_id.value())) {
    return fail(ErrorCode::FunctionNotFound, "function not found: " + function_id.value());
  }
  if (!state.roles.contains(role_id.value())) {
    return fail(ErrorCode::RoleNotFound, "role not found: " + role_id.value());
  }
  auto [it, _] = state.policies.try_emplace(
      function_id.value(),
      engine::Policy{function_id.value(), {}, policy::PolicyMode::any_of()});
  if (!it->second.required_roles.insert(role_id.value()).second) {
    if (it->second.required_roles.empty()) state.policies.erase(it);
    return fail(ErrorCode::DuplicateBinding, "role already bound");
  }
  return {};
}

Result<void> v2_policy_unbind(EngineState& state, const json& payload) {
  auto function_id = str_field(payload, "function_id");
  auto role_id = str_field(payload, "role_id");
  if (!function_id) return function_id.error();
  if (!role_id) return role_id.error();
  if (!state.functions.contains(function_id.value())) {
    return fail(ErrorCode::FunctionNotFound, "function not found: " + function_id.value());
  }
  if (!state.roles.contains(role_id.value())) {
    return fail(ErrorCode::RoleNotFound, "role not found: " + role_id.value());
  }
  const auto it = state.policies.find(function_id.value());
  if (it == state.policies.end() || !it->second.required_roles.contains(role_id.value())) {
    return fail(ErrorCode::BindingNotFound, "role is not bound");
  }
  if (!it->second.mode.is_any_of() &&
      it->second.required_roles.size() - 1 < it->second.mode.threshold()) {
    return fail(ErrorCode::ThresholdViolation, "unbind would violate m-of-p threshold");
  }
  it->second.required_roles.erase(role_id.value());
  if (it->second.required_roles.empty()) state.policies.erase(it);
  return {};
}

Result<void> v2_policy_set_mode(EngineState& state, const json& payload) {
  auto function_id = str_field(payload, "function_id");
  if (!function_id) return function_id.error();
  if (!payload.contains("mode")) {
    return fail(ErrorCode::InvalidEvent, "payload missing field 'mode'");
  }
  auto mode = policy::mode_from_json(payload["mode"]);
  if (!mode) return mode.error();
  if (!state.functions.contains(function_id.value())) {
    return fail(ErrorCode::FunctionNotFound, "function not found: " + function_id.value());
  }
  const auto it = state.policies.find(function_id.value());
  if (!mode.value().is_any_of()) {
    const std::size_t bound = it == state.policies.end() ? 0 : it->second.required_roles.size();
    if (mode.value().threshold() < 1 || mode.value().threshold() > bound) {
      return fail(ErrorCode::ThresholdViolation, "threshold out of range for bound roles");
    }
  }
  if (it != state.policies.end()) {
    it->second.mode = mode.value();
  }
  return {};
}

Result<void> v2_user_import(EngineState& state, const json& payload) {
  auto import = engine::import_from_payload(payload);
  if (!import) return import.error();
  std::set<std::string> ids;
  std::set<std::string> refs;
  std::size_t index = 1;
  for (const auto& entry : import.value().entries) {
    if (state.users.contains(entry.user.id.value()) || !ids.insert(entry.user.id.value()).second) {
      return fail(ErrorCode::DuplicateUserInImport,
                  "user already exists: " + entry.user.id.value(), {{"line", index}});
    }
    if (entry.user.external_ref) {
      if (!refs.insert(*entry.user.external_ref).second) {
        return fail(ErrorCode::DuplicateUserInImport, "external_ref repeated in import",
                    {{"line", index}});
      }
      for (const auto& [existing_id, existing] : state.users) {
        if (existing.external_ref == entry.user.external_ref) {
          return fail(ErrorCode::DuplicateUserInImport,
                      "external_ref already bound to user " + existing_id, {{"line", index}});
        }
      }
    }
    for (const auto& role : entry.roles) {
      if (!state.roles.contains(role)) {
        return fail(ErrorCode::UnknownRoleInImport, "unknown role in import: " + role,
                    {{"line", index}, {"role", role}});
      }
    }
    ++index;
  }
  for (const auto& entry : import.value().entries) {
    state.users.emplace(entry.user.id.value(), entry.user);
    if (!entry.roles.empty()) {
      state.user_roles[entry.user.id.value()] = entry.roles;
    }
  }
  return {};
}

using Handler = std::function<Result<void>(EngineState&, const json&)>;

const std::map<std::string, Handler>& dispatch_table() {
  static const std::map<std::string, Handler> table = {
      {"function.register", v2_function_register},
      {"function.remove", v2_function_remove},
      {"policy.bind", v2_policy_bind},
      {"policy.set_mode", v2_policy_set_mode},
      {"policy.unbind", v2_policy_unbind},
      {"role.add", v2_role_add},
      {"role.remove", v2_role_remove},
      {"role.update", v2_role_update},
      {"user.add", v2_user_add},
      {"user.assign_role", v2_assign_role},
      {"user.import", v2_user_import},
      {"user.remove", v2_user_remove},
      {"user.revoke_role", v2_revoke_role},
      {"user.set_active", v2_user_set_active},
  };
  return table;
}

}  // namespace

Result<void> apply_operation_v2(engine::EngineState& state, std::string_view operation,
                                const nlohmann::json& payload) {
  const auto& table = dispatch_table();
  const auto it = table.find(std::string(operation));
  if (it == table.end()) {
    return make_error(ErrorCode::UnknownOperation,
                      "unknown operation: " + std::string(operation),
                      {{"operation", std::string(operation)}});
  }
  if (auto applied = it->second(state, payload); !applied) {
    return applied;
  }
  state.version += 1;
  return {};
}

}  // namespace drbac::store::logic_v2
