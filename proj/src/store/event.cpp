#include "drbac/store/event.h"

#include "drbac/util/sha256.h"

namespace drbac::store {

std::string canonical_payload(const nlohmann::json& payload) {
  return payload.dump();
}

util::Digest32 chain_hash(const util::Digest32& prev_hash, std::uint64_t sequence,
                          std::string_view operation, std::string_view payload_canonical) {
  std::string preimage;
  preimage.reserve(prev_hash.size() + 8 + operation.size() + 1 + payload_canonical.size());
  preimage.append(reinterpret_cast<const char*>(prev_hash.data()), prev_hash.size());
  for (int shift = 56; shift >= 0; shift -= 8) {
    preimage.push_back(static_cast<char>((sequence >> shift) & 0xff));
  }
  preimage.append(operation);
  preimage.push_back('\n');
  preimage.append(payload_canonical);
  return util::sha256(preimage);
}

nlohmann::json event_to_json(const MutationEvent& event) {
  return nlohmann::json{{"actor", event.actor},
                        {"operation", event.operation},
                        {"payload", event.payload},
                        {"prev_hash", util::to_hex(event.prev_hash)},
                        {"sequence", event.sequence},
                        {"this_hash", util::to_hex(event.this_hash)},
                        {"timestamp_ms", event.timestamp_ms}};
}

Result<MutationEvent> event_from_json(const nlohmann::json& value) {
  if (!value.is_object()) {
    return make_error(ErrorCode::InvalidEvent, "event record must be a JSON object");
  }
  const auto missing = [&](const char* field) {
    return make_error(ErrorCode::InvalidEvent,
                      std::string("event record missing field '") + field + "'");
  };
  if (!value.contains("sequence") || !value["sequence"].is_number_unsigned()) {
    return missing("sequence");
  }
  if (!value.contains("timestamp_ms") || !value["timestamp_ms"].is_number_unsigned()) {
    return missing("timestamp_ms");
  }
  if (!value.contains("actor") || !value["actor"].is_string()) return missing("actor");
  if (!value.contains("operation") || !value["operation"].is_string()) {
    return missing("operation");
  }
  if (!value.contains("payload")) return missing("payload");
  if (!value.contains("prev_hash") || !value["prev_hash"].is_string()) {
    return missing("prev_hash");
  }
  if (!value.contains("this_hash") || !value["this_hash"].is_string()) {
    return missing("this_hash");
  }

  MutationEvent event;
  event.sequence = value["sequence"].get<std::uint64_t>();
  event.timestamp_ms = value["timestamp_ms"].get<std::uint64_t>();
  event.actor = value["actor"].get<std::string>();
  event.operation = value["operation"].get<std::string>();
  event.payload = value["payload"];

  auto prev = util::digest_from_hex(value["prev_hash"].get<std::string>());
  if (!prev) {
    return make_error(ErrorCode::InvalidEvent, "event prev_hash is not a 64-char hex digest");
  }
  auto self = util::digest_from_hex(value["this_hash"].get<std::string>());
  if (!self) {
    return make_error(ErrorCode::InvalidEvent, "event this_hash is not a 64-char hex digest");
  }
  event.prev_hash = *prev;
  event.this_hash = *self;
  return event;
}

}  // namespace drbac::store
