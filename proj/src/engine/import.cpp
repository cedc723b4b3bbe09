#include "drbac/engine/import.h"

namespace drbac::engine {

namespace {

Result<ImportEntry> entry_from_json(const nlohmann::json& body, std::size_t index) {
  if (!body.is_object()) {
    return make_error(ErrorCode::ParseError, "import entry " + std::to_string(index) +
                                                 " must be an object");
  }
  nlohmann::json user_body = body;
  user_body.erase("roles");
  if (!user_body.contains("id") || user_body["id"].is_null()) {
    if (!user_body.contains("external_ref") || !user_body["external_ref"].is_string()) {
      return make_error(ErrorCode::ParseError,
                        "import entry " + std::to_string(index) +
                            " needs an id or an external_ref to derive one from");
    }
    user_body["id"] = user_body["external_ref"];
  }
  auto user = model::user_from_json(user_body);
  if (!user) {
    Error err = std::move(user).error();
    err.details["entry"] = index;
    return err;
  }
  ImportEntry entry{std::move(user).value(), {}};
  if (body.contains("roles")) {
    if (!body["roles"].is_array()) {
      return make_error(ErrorCode::ParseError,
                        "import entry " + std::to_string(index) + " roles must be an array");
    }
    for (const auto& role : body["roles"]) {
      if (!role.is_string()) {
        return make_error(ErrorCode::ParseError,
                          "import entry " + std::to_string(index) + " roles must be strings");
      }
      entry.roles.insert(role.get<std::string>());
    }
  }
  return entry;
}

Result<BulkImport> from_document(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("users") || !doc["users"].is_array()) {
    return make_error(ErrorCode::ParseError, "import document must carry a users array");
  }
  BulkImport import;
  if (doc.contains("format_version")) {
    if (!doc["format_version"].is_number_integer()) {
      return make_error(ErrorCode::ParseError, "format_version must be an integer");
    }
    import.format_version = doc["format_version"].get<int>();
    if (import.format_version != 1) {
      return make_error(ErrorCode::ParseError,
                        "unsupported import format_version " +
                            std::to_string(import.format_version));
    }
  }
  std::size_t index = 1;
  for (const auto& body : doc["users"]) {
    auto entry = entry_from_json(body, index);
    if (!entry) {
      return entry.error();
    }
    import.entries.push_back(std::move(entry).value());
    ++index;
  }
  return import;
}

}  // namespace

Result<BulkImport> parse_bulk_import(const std::string& text) {
  const auto doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    return make_error(ErrorCode::ParseError, "import file is not valid JSON");
  }
  return from_document(doc);
}

nlohmann::json import_to_payload(const BulkImport& import) {
  nlohmann::json users = nlohmann::json::array();
  for (const ImportEntry& entry : import.entries) {
    nlohmann::json body = entry.user;
    body["roles"] = entry.roles;
    users.push_back(std::move(body));
  }
  return nlohmann::json{{"format_version", import.format_version}, {"users", std::move(users)}};
}

Result<BulkImport> import_from_payload(const nlohmann::json& payload) {
  return from_document(payload);
}

void to_json(nlohmann::json& j, const ImportSummary& summary) {
  j = nlohmann::json{{"roles_granted", summary.roles_granted},
                     {"users_created", summary.users_created}};
}

}  // namespace drbac::engine
