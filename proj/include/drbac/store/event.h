#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "drbac/result.h"
#include "drbac/util/hex.h"

namespace drbac::store {

// One appended mutation. Events form a hash chain: this_hash commits to the
// predecessor hash, the sequence number, the operation name, and the canonical
// payload encoding. Timestamps and actor are carried for audit display but are
// not covered by the chain.
struct MutationEvent {
  std::uint64_t sequence = 0;
  std::uint64_t timestamp_ms = 0;
  std::string actor;
  std::string operation;
  nlohmann::json payload = nlohmann::json::object();
  util::Digest32 prev_hash = util::kZeroDigest;
  util::Digest32 this_hash = util::kZeroDigest;

  bool operator==(const MutationEvent&) const = default;
};

// Canonical payload encoding used for hashing: compact JSON with `operator<`
// key order (nlohmann's default object map) and no insignificant whitespace.
std::string canonical_payload(const nlohmann::json& payload);

// H(prev_hash || be64(sequence) || operation || '\n' || canonical_payload).
util::Digest32 chain_hash(const util::Digest32& prev_hash, std::uint64_t sequence,
                          std::string_view operation, std::string_view payload_canonical);

nlohmann::json event_to_json(const MutationEvent& event);
Result<MutationEvent> event_from_json(const nlohmann::json& value);

}  // namespace drbac::store
