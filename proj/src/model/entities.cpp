#include "drbac/model/entities.h"

#include "drbac/util/base64.h"

namespace drbac::model {

namespace {

Result<Metadata> metadata_from_json(const nlohmann::json& j) {
  Metadata out;
  if (j.is_null()) {
    return out;
  }
  if (!j.is_object()) {
    return make_error(ErrorCode::ParseError, "metadata must be an object of strings");
  }
  for (const auto& [key, value] : j.items()) {
    if (!value.is_string()) {
      return make_error(ErrorCode::ParseError, "metadata value for '" + key + "' must be a string");
    }
    out.emplace(key, value.get<std::string>());
  }
  return out;
}

Result<EntityId> id_field(const nlohmann::json& j, EntityKind kind) {
  // Accepts either the full {kind, value} object or a bare string.
  if (j.contains("id")) {
    const auto& id = j["id"];
    if (id.is_string()) {
      return EntityId::parse(kind, id.get<std::string>());
    }
    auto parsed = entity_id_from_json(id);
    if (!parsed) {
      return parsed;
    }
    if (parsed.value().kind() != kind) {
      return make_error(ErrorCode::ParseError, "id has wrong entity kind");
    }
    return parsed;
  }
  return make_error(ErrorCode::ParseError, "missing id field");
}

}  // namespace

void to_json(nlohmann::json& j, const User& user) {
  j = nlohmann::json{
      {"active", user.active},
      {"external_ref", user.external_ref ? nlohmann::json(*user.external_ref) : nlohmann::json()},
      {"id", user.id},
      {"metadata", user.metadata},
  };
}

void to_json(nlohmann::json& j, const Role& role) {
  j = nlohmann::json{
      {"description", role.description},
      {"id", role.id},
      {"metadata", role.metadata},
  };
}

void to_json(nlohmann::json& j, const FunctionDef& fn) {
  j = nlohmann::json{
      {"function_name", fn.function_name},
      {"id", fn.id},
      {"selector", fn.selector ? nlohmann::json(util::base64_encode(*fn.selector))
                               : nlohmann::json()},
      {"target_contract", fn.target_contract},
  };
}

void to_json(nlohmann::json& j, const Request& request) {
  j = nlohmann::json{
      {"call_args", util::base64_encode(request.call_args)},
      {"function_id", request.function_id},
      {"request_id", request.request_id},
      {"user_id", request.user_id},
  };
}

Result<User> user_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    return make_error(ErrorCode::ParseError, "user must be a JSON object");
  }
  auto id = id_field(j, EntityKind::User);
  if (!id) {
    return id.error();
  }
  std::optional<std::string> external_ref;
  if (j.contains("external_ref") && !j["external_ref"].is_null()) {
    if (!j["external_ref"].is_string()) {
      return make_error(ErrorCode::ParseError, "external_ref must be a string");
    }
    external_ref = j["external_ref"].get<std::string>();
  }
  auto metadata = metadata_from_json(j.value("metadata", nlohmann::json()));
  if (!metadata) {
    return metadata.error();
  }
  bool active = true;
  if (j.contains("active")) {
    if (!j["active"].is_boolean()) {
      return make_error(ErrorCode::ParseError, "active must be a boolean");
    }
    active = j["active"].get<bool>();
  }
  return User{std::move(id).value(), std::move(external_ref), std::move(metadata).value(), active};
}

Result<Role> role_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    return make_error(ErrorCode::ParseError, "role must be a JSON object");
  }
  auto id = id_field(j, EntityKind::Role);
  if (!id) {
    return id.error();
  }
  std::string description;
  if (j.contains("description") && !j["description"].is_null()) {
    if (!j["description"].is_string()) {
      return make_error(ErrorCode::ParseError, "description must be a string");
    }
    description = j["description"].get<std::string>();
  }
  auto metadata = metadata_from_json(j.value("metadata", nlohmann::json()));
  if (!metadata) {
    return metadata.error();
  }
  return Role{std::move(id).value(), std::move(description), std::move(metadata).value()};
}

Result<FunctionDef> function_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    return make_error(ErrorCode::ParseError, "function must be a JSON object");
  }
  auto id = id_field(j, EntityKind::Function);
  if (!id) {
    return id.error();
  }
  if (!j.contains("target_contract") || !j["target_contract"].is_string() ||
      !j.contains("function_name") || !j["function_name"].is_string()) {
    return make_error(ErrorCode::ParseError,
                      "function requires string target_contract and function_name");
  }
  std::optional<Bytes> selector;
  if (j.contains("selector") && !j["selector"].is_null()) {
    if (!j["selector"].is_string()) {
      return make_error(ErrorCode::ParseError, "selector must be a base64 string");
    }
    auto decoded = util::base64_decode(j["selector"].get<std::string>());
    if (!decoded) {
      return make_error(ErrorCode::ParseError, "selector is not valid base64");
    }
    selector = std::move(*decoded);
  }
  return FunctionDef{std::move(id).value(), j["target_contract"].get<std::string>(),
                     j["function_name"].get<std::string>(), std::move(selector)};
}

}  // namespace drbac::model
