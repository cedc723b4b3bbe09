#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "drbac/model/ids.h"
#include "drbac/result.h"

namespace drbac::model {

using Bytes = std::vector<std::uint8_t>;
using Metadata = std::map<std::string, std::string>;

struct User {
  EntityId id;  // kind User
  std::optional<std::string> external_ref;  // IdM subject identifier, unique when present
  Metadata metadata;
  bool active = true;
};

struct Role {
  EntityId id;  // kind Role
  std::string description;
  Metadata metadata;
};

struct FunctionDef {
  EntityId id;  // kind Function
  std::string target_contract;
  std::string function_name;
  std::optional<Bytes> selector;
};

// An invocation attempt. Ids are raw strings on purpose: unknown or malformed
// ids must surface as deny decisions from the check, not as parse failures.
struct Request {
  std::string user_id;
  std::string function_id;
  Bytes call_args;
  std::string request_id;  // unique per dispatcher invocation; minted when empty
};

void to_json(nlohmann::json& j, const User& user);
void to_json(nlohmann::json& j, const Role& role);
void to_json(nlohmann::json& j, const FunctionDef& fn);
void to_json(nlohmann::json& j, const Request& request);

Result<User> user_from_json(const nlohmann::json& j);
Result<Role> role_from_json(const nlohmann::json& j);
Result<FunctionDef> function_from_json(const nlohmann::json& j);

}  // namespace drbac::model
