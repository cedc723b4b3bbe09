#pragma once

#include <nlohmann/json.hpp>

#include <compare>
#include <set>
#include <string>
#include <string_view>

#include "drbac/result.h"

namespace drbac::model {

enum class EntityKind { User, Role, Function };

std::string_view entity_kind_name(EntityKind kind);
Result<EntityKind> entity_kind_from_name(std::string_view name);

inline constexpr std::size_t kMaxIdLength = 128;

// Opaque, case-sensitive identifier. Two ids of different kind never compare
// equal even when their values match.
class EntityId {
 public:
  // Validation: non-empty, at most kMaxIdLength bytes, no ASCII whitespace or
  // control characters. Errors: EmptyId, TooLong, IllegalCharacter.
  static Result<EntityId> parse(EntityKind kind, std::string_view raw);

  EntityKind kind() const { return kind_; }
  const std::string& value() const { return value_; }

  auto operator<=>(const EntityId&) const = default;

 private:
  EntityId(EntityKind kind, std::string value) : kind_(kind), value_(std::move(value)) {}

  EntityKind kind_;
  std::string value_;
};

void to_json(nlohmann::json& j, const EntityId& id);
Result<EntityId> entity_id_from_json(const nlohmann::json& j);

using RoleIdSet = std::set<std::string>;

// Exact a ∩ b; pure and commutative.
RoleIdSet role_intersection(const RoleIdSet& a, const RoleIdSet& b);

}  // namespace drbac::model
