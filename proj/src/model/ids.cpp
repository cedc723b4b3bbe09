#include "drbac/model/ids.h"

#include <algorithm>

namespace drbac::model {

std::string_view entity_kind_name(EntityKind kind) {
  switch (kind) {
    case EntityKind::User: return "user";
    case EntityKind::Role: return "role";
    case EntityKind::Function: return "function";
  }
  return "user";
}

Result<EntityKind> entity_kind_from_name(std::string_view name) {
  if (name == "user") return EntityKind::User;
  if (name == "role") return EntityKind::Role;
  if (name == "function") return EntityKind::Function;
  return make_error(ErrorCode::ParseError, "unknown entity kind: " + std::string(name));
}

Result<EntityId> EntityId::parse(EntityKind kind, std::string_view raw) {
  if (raw.empty()) {
    return make_error(ErrorCode::EmptyId, "identifier must be non-empty");
  }
  if (raw.size() > kMaxIdLength) {
    return make_error(ErrorCode::TooLong,
                      "identifier exceeds " + std::to_string(kMaxIdLength) + " bytes",
                      {{"length", raw.size()}});
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(raw[i]);
    if (c <= 0x20 || c == 0x7f) {
      return make_error(ErrorCode::IllegalCharacter,
                        "identifier contains whitespace or control character",
                        {{"position", i}});
    }
  }
  return EntityId(kind, std::string(raw));
}

void to_json(nlohmann::json& j, const EntityId& id) {
  j = nlohmann::json{{"kind", std::string(entity_kind_name(id.kind()))}, {"value", id.value()}};
}

Result<EntityId> entity_id_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.contains("value") ||
      !j["kind"].is_string() || !j["value"].is_string()) {
    return make_error(ErrorCode::ParseError, "entity id must be {kind, value}");
  }
  auto kind = entity_kind_from_name(j["kind"].get<std::string>());
  if (!kind) {
    return kind.error();
  }
  return EntityId::parse(kind.value(), j["value"].get<std::string>());
}

RoleIdSet role_intersection(const RoleIdSet& a, const RoleIdSet& b) {
  RoleIdSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(out, out.end()));
  return out;
}

}  // namespace drbac::model
