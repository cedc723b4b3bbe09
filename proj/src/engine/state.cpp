#include "drbac/engine/state.h"

namespace drbac::engine {

std::string_view manager_kind_name(ManagerKind kind) {
  switch (kind) {
    case ManagerKind::RoleMgr: return "role";
    case ManagerKind::FunctionMgr: return "function";
    case ManagerKind::UserMgr: return "user";
    case ManagerKind::PolicyMgr: return "policy";
  }
  return "role";
}

Result<ManagerKind> manager_kind_from_name(std::string_view name) {
  if (name == "role") return ManagerKind::RoleMgr;
  if (name == "function") return ManagerKind::FunctionMgr;
  if (name == "user") return ManagerKind::UserMgr;
  if (name == "policy") return ManagerKind::PolicyMgr;
  return make_error(ErrorCode::ParseError, "unknown manager: " + std::string(name));
}

std::vector<std::string> users_holding_role(const EngineState& state,
                                            const std::string& role_id) {
  std::vector<std::string> out;
  for (const auto& [user_id, roles] : state.user_roles) {
    if (roles.contains(role_id)) {
      out.push_back(user_id);
    }
  }
  return out;
}

std::vector<std::string> functions_requiring_role(const EngineState& state,
                                                  const std::string& role_id) {
  std::vector<std::string> out;
  for (const auto& [function_id, policy] : state.policies) {
    if (policy.required_roles.contains(role_id)) {
      out.push_back(function_id);
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const Policy& policy) {
  j = nlohmann::json{
      {"function_id", policy.function_id},
      {"mode", policy.mode},
      {"required_roles", policy.required_roles},
  };
}

nlohmann::json state_to_json(const EngineState& state) {
  nlohmann::json users = nlohmann::json::object();
  for (const auto& [id, user] : state.users) {
    users[id] = user;
  }
  nlohmann::json roles = nlohmann::json::object();
  for (const auto& [id, role] : state.roles) {
    roles[id] = role;
  }
  nlohmann::json functions = nlohmann::json::object();
  for (const auto& [id, fn] : state.functions) {
    functions[id] = fn;
  }
  nlohmann::json user_roles = nlohmann::json::array();
  for (const auto& [user_id, role_set] : state.user_roles) {
    for (const auto& role_id : role_set) {
      user_roles.push_back(nlohmann::json::array({user_id, role_id}));
    }
  }
  nlohmann::json policies = nlohmann::json::object();
  for (const auto& [id, policy] : state.policies) {
    policies[id] = policy;
  }
  return nlohmann::json{
      {"functions", std::move(functions)}, {"policies", std::move(policies)},
      {"roles", std::move(roles)},         {"user_roles", std::move(user_roles)},
      {"users", std::move(users)},         {"version", state.version},
  };
}

Result<EngineState> state_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    return make_error(ErrorCode::ParseError, "state must be a JSON object");
  }
  EngineState state;
  // .value() returns by value; the containers must outlive their items() view.
  const nlohmann::json users = j.value("users", nlohmann::json::object());
  const nlohmann::json roles = j.value("roles", nlohmann::json::object());
  const nlohmann::json functions = j.value("functions", nlohmann::json::object());
  const nlohmann::json user_roles = j.value("user_roles", nlohmann::json::array());
  const nlohmann::json policies = j.value("policies", nlohmann::json::object());
  for (const auto& [id, body] : users.items()) {
    auto user = model::user_from_json(body);
    if (!user) {
      return user.error();
    }
    state.users.emplace(id, std::move(user).value());
  }
  for (const auto& [id, body] : roles.items()) {
    auto role = model::role_from_json(body);
    if (!role) {
      return role.error();
    }
    state.roles.emplace(id, std::move(role).value());
  }
  for (const auto& [id, body] : functions.items()) {
    auto fn = model::function_from_json(body);
    if (!fn) {
      return fn.error();
    }
    state.functions.emplace(id, std::move(fn).value());
  }
  for (const auto& pair : user_roles) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
      return make_error(ErrorCode::ParseError, "user_roles entries must be [user, role] pairs");
    }
    state.user_roles[pair[0].get<std::string>()].insert(pair[1].get<std::string>());
  }
  for (const auto& [id, body] : policies.items()) {
    if (!body.is_object() || !body.contains("required_roles") ||
        !body["required_roles"].is_array()) {
      return make_error(ErrorCode::ParseError, "policy must carry required_roles");
    }
    Policy policy;
    policy.function_id = body.value("function_id", id);
    for (const auto& role : body["required_roles"]) {
      if (!role.is_string()) {
        return make_error(ErrorCode::ParseError, "required_roles entries must be strings");
      }
      policy.required_roles.insert(role.get<std::string>());
    }
    auto mode = policy::mode_from_json(body.value("mode", nlohmann::json{{"kind", "any_of"}}));
    if (!mode) {
      return mode.error();
    }
    policy.mode = mode.value();
    state.policies.emplace(id, std::move(policy));
  }
  if (j.contains("version")) {
    if (!j["version"].is_number_unsigned()) {
      return make_error(ErrorCode::ParseError, "version must be an unsigned integer");
    }
    state.version = j["version"].get<std::uint64_t>();
  }
  return state;
}

std::string canonical_state(const EngineState& state) {
  return state_to_json(state).dump();
}

}  // namespace drbac::engine
