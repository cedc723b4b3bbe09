#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "drbac/model/entities.h"
#include "drbac/policy/mode.h"
#include "drbac/result.h"

namespace drbac::engine {

// Per-function access rule. State keeps an entry only while required_roles is
// non-empty; a function without an entry evaluates as ({}, AnyOf).
struct Policy {
  std::string function_id;
  model::RoleIdSet required_roles;
  policy::PolicyMode mode = policy::PolicyMode::any_of();
};

enum class ManagerKind { RoleMgr, FunctionMgr, UserMgr, PolicyMgr };

std::string_view manager_kind_name(ManagerKind kind);
Result<ManagerKind> manager_kind_from_name(std::string_view name);

struct AdminScope {
  std::string admin_group;
  std::set<ManagerKind> permitted_managers;

  static AdminScope full(std::string group) {
    return AdminScope{std::move(group),
                      {ManagerKind::RoleMgr, ManagerKind::FunctionMgr, ManagerKind::UserMgr,
                       ManagerKind::PolicyMgr}};
  }

  bool permits(ManagerKind kind) const { return permitted_managers.contains(kind); }
};

struct EngineState {
  std::map<std::string, model::User> users;
  std::map<std::string, model::Role> roles;
  std::map<std::string, model::FunctionDef> functions;
  // U_R adjacency; entries with empty role sets are dropped.
  std::map<std::string, model::RoleIdSet> user_roles;
  std::map<std::string, Policy> policies;
  std::uint64_t version = 0;
};

// Referential-integrity scans used by the deletion guards.
std::vector<std::string> users_holding_role(const EngineState& state, const std::string& role_id);
std::vector<std::string> functions_requiring_role(const EngineState& state,
                                                  const std::string& role_id);

nlohmann::json state_to_json(const EngineState& state);
Result<EngineState> state_from_json(const nlohmann::json& j);

// Deterministic serialization: sorted keys, sets as sorted arrays. Two states
// are equal iff their canonical serializations are byte-identical.
std::string canonical_state(const EngineState& state);

void to_json(nlohmann::json& j, const Policy& policy);

}  // namespace drbac::engine
