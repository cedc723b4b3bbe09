#include "drbac/store/snapshot.h"

#include <fstream>

#include "drbac/util/sha256.h"

namespace drbac::store {

Snapshot make_snapshot(const engine::EngineState& state, const LogHeader& header,
                       const util::Digest32& anchor_hash, std::uint64_t up_to_sequence) {
  Snapshot snapshot;
  snapshot.anchor_hash = anchor_hash;
  snapshot.header = header;
  snapshot.state = state;
  snapshot.state_digest = util::sha256(engine::canonical_state(state));
  snapshot.up_to_sequence = up_to_sequence;
  return snapshot;
}

nlohmann::json snapshot_to_json(const Snapshot& snapshot) {
  return nlohmann::json{{"anchor_hash", util::to_hex(snapshot.anchor_hash)},
                        {"header", header_to_json(snapshot.header)},
                        {"state", engine::state_to_json(snapshot.state)},
                        {"state_digest", util::to_hex(snapshot.state_digest)},
                        {"up_to_sequence", snapshot.up_to_sequence}};
}

Result<Snapshot> snapshot_from_json(const nlohmann::json& value) {
  if (!value.is_object() || !value.contains("anchor_hash") || !value.contains("header") ||
      !value.contains("state") || !value.contains("state_digest") ||
      !value.contains("up_to_sequence")) {
    return make_error(ErrorCode::SnapshotCorrupt, "snapshot is missing required fields");
  }
  Snapshot snapshot;
  if (!value["anchor_hash"].is_string() || !value["state_digest"].is_string() ||
      !value["up_to_sequence"].is_number_unsigned()) {
    return make_error(ErrorCode::SnapshotCorrupt, "snapshot field has wrong type");
  }
  auto anchor = util::digest_from_hex(value["anchor_hash"].get<std::string>());
  auto digest = util::digest_from_hex(value["state_digest"].get<std::string>());
  if (!anchor || !digest) {
    return make_error(ErrorCode::SnapshotCorrupt, "snapshot digest is not valid hex");
  }
  auto header = header_from_json(value["header"]);
  if (!header) {
    return make_error(ErrorCode::SnapshotCorrupt, "snapshot header invalid: " +
                                                      header.error().message);
  }
  auto state = engine::state_from_json(value["state"]);
  if (!state) {
    return make_error(ErrorCode::SnapshotCorrupt, "snapshot state invalid: " +
                                                      state.error().message);
  }
  snapshot.anchor_hash = *anchor;
  snapshot.header = std::move(header).value();
  snapshot.state = std::move(state).value();
  snapshot.state_digest = *digest;
  snapshot.up_to_sequence = value["up_to_sequence"].get<std::uint64_t>();

  const util::Digest32 recomputed = util::sha256(engine::canonical_state(snapshot.state));
  if (recomputed != snapshot.state_digest) {
    return make_error(ErrorCode::SnapshotCorrupt, "snapshot state does not match its digest",
                      {{"expected", util::to_hex(snapshot.state_digest)},
                       {"recomputed", util::to_hex(recomputed)}});
  }
  return snapshot;
}

Result<void> write_snapshot_file(const Snapshot& snapshot, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return make_error(ErrorCode::StorageFailure, "cannot open snapshot file for write",
                      {{"path", path.string()}});
  }
  out << snapshot_to_json(snapshot).dump(2) << '\n';
  out.flush();
  if (!out) {
    return make_error(ErrorCode::StorageFailure, "write to snapshot file failed",
                      {{"path", path.string()}});
  }
  return {};
}

Result<Snapshot> read_snapshot_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return make_error(ErrorCode::StorageFailure, "cannot open snapshot file",
                      {{"path", path.string()}});
  }
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto value = nlohmann::json::parse(text, nullptr, false);
  if (value.is_discarded()) {
    return make_error(ErrorCode::SnapshotCorrupt, "snapshot file is not valid JSON",
                      {{"path", path.string()}});
  }
  return snapshot_from_json(value);
}

}  // namespace drbac::store
