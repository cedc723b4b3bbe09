#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "drbac/model/entities.h"
#include "drbac/result.h"

namespace drbac::engine {

struct ImportEntry {
  model::User user;
  model::RoleIdSet roles;  // role names to grant; all must pre-exist
};

struct BulkImport {
  int format_version = 1;
  std::vector<ImportEntry> entries;
};

struct ImportSummary {
  std::size_t users_created = 0;
  std::size_t roles_granted = 0;
};

// File schema: {"format_version": 1, "users": [{"external_ref": ..,
// "id"?: .., "metadata"?: {..}, "active"?: bool, "roles": [..]}]}.
// The user id defaults to the entry's external_ref when absent.
Result<BulkImport> parse_bulk_import(const std::string& text);

nlohmann::json import_to_payload(const BulkImport& import);
Result<BulkImport> import_from_payload(const nlohmann::json& payload);

void to_json(nlohmann::json& j, const ImportSummary& summary);

}  // namespace drbac::engine
