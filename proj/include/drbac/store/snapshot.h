#pragma once

#include <filesystem>

#include "drbac/engine/state.h"
#include "drbac/store/log.h"

namespace drbac::store {

// A point-in-time copy of the replayed state, anchored to the log by the hash
// of the last event it covers. Snapshots are an optimization only — the log
// remains the source of truth and any snapshot can be revalidated against it.
struct Snapshot {
  util::Digest32 anchor_hash = util::kZeroDigest;
  LogHeader header;
  engine::EngineState state;
  util::Digest32 state_digest = util::kZeroDigest;
  std::uint64_t up_to_sequence = 0;

  bool operator==(const Snapshot&) const = default;
};

Snapshot make_snapshot(const engine::EngineState& state, const LogHeader& header,
                       const util::Digest32& anchor_hash, std::uint64_t up_to_sequence);

nlohmann::json snapshot_to_json(const Snapshot& snapshot);

// Parses and revalidates: the embedded state must hash to state_digest.
Result<Snapshot> snapshot_from_json(const nlohmann::json& value);

Result<void> write_snapshot_file(const Snapshot& snapshot, const std::filesystem::path& path);
Result<Snapshot> read_snapshot_file(const std::filesystem::path& path);

}  // namespace drbac::store
