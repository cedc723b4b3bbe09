#include "drbac/store/log.h"

#include <fstream>
#include <sstream>

namespace drbac::store {

// ── sinks ───────────────────────────────────────────────────────────────────

FileLineSink::FileLineSink(std::filesystem::path path) : path_(std::move(path)) {}

Result<void> FileLineSink::append_line(const std::string& line) {
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) {
    return make_error(ErrorCode::StorageFailure, "cannot open log file for append",
                      {{"path", path_.string()}});
  }
  out << line << '\n';
  out.flush();
  if (!out) {
    return make_error(ErrorCode::StorageFailure, "write to log file failed",
                      {{"path", path_.string()}});
  }
  return {};
}

Result<void> MemoryLineSink::append_line(const std::string& line) {
  lines_.push_back(line);
  return {};
}

// ── header ──────────────────────────────────────────────────────────────────

nlohmann::json header_to_json(const LogHeader& header) {
  return nlohmann::json{{"format_version", header.format_version},
                        {"hash_algorithm", header.hash_algorithm},
                        {"magic", header.magic}};
}

Result<LogHeader> header_from_json(const nlohmann::json& value) {
  if (!value.is_object() || !value.contains("magic") || !value["magic"].is_string() ||
      value["magic"].get<std::string>() != "DRBAC_LOG") {
    return make_error(ErrorCode::InvalidEvent, "log header missing DRBAC_LOG magic");
  }
  if (!value.contains("format_version") || !value["format_version"].is_number_unsigned()) {
    return make_error(ErrorCode::InvalidEvent, "log header missing format_version");
  }
  if (!value.contains("hash_algorithm") || !value["hash_algorithm"].is_string()) {
    return make_error(ErrorCode::InvalidEvent, "log header missing hash_algorithm");
  }
  LogHeader header;
  header.format_version = value["format_version"].get<std::uint32_t>();
  header.hash_algorithm = value["hash_algorithm"].get<std::string>();
  if (header.format_version != 1) {
    return make_error(ErrorCode::InvalidEvent, "unsupported log format_version",
                      {{"format_version", header.format_version}});
  }
  if (header.hash_algorithm != "sha-256") {
    return make_error(ErrorCode::InvalidEvent, "unsupported hash_algorithm",
                      {{"hash_algorithm", header.hash_algorithm}});
  }
  return header;
}

// ── event log ───────────────────────────────────────────────────────────────

EventLog::EventLog(std::unique_ptr<LineSink> sink, LogHeader header, util::Digest32 last_hash,
                   std::uint64_t next_sequence)
    : sink_(std::move(sink)),
      header_(std::move(header)),
      last_hash_(last_hash),
      next_sequence_(next_sequence) {}

Result<EventLog> EventLog::create(std::unique_ptr<LineSink> sink) {
  LogHeader header;
  if (auto written = sink->append_line(header_to_json(header).dump()); !written) {
    return written.error();
  }
  return EventLog(std::move(sink), header, util::kZeroDigest, 1);
}

EventLog EventLog::resume(std::unique_ptr<LineSink> sink, LogHeader header,
                          util::Digest32 last_hash, std::uint64_t last_sequence) {
  return EventLog(std::move(sink), std::move(header), last_hash, last_sequence + 1);
}

Result<MutationEvent> EventLog::append(const std::string& actor, const std::string& operation,
                                       const nlohmann::json& payload,
                                       std::uint64_t timestamp_ms) {
  MutationEvent event;
  event.sequence = next_sequence_;
  event.timestamp_ms = timestamp_ms;
  event.actor = actor;
  event.operation = operation;
  event.payload = payload;
  event.prev_hash = last_hash_;
  event.this_hash = chain_hash(last_hash_, event.sequence, operation, canonical_payload(payload));

  if (auto written = sink_->append_line(event_to_json(event).dump()); !written) {
    // Position unchanged: a retry re-uses the same sequence number.
    return written.error();
  }
  last_hash_ = event.this_hash;
  next_sequence_ += 1;
  return event;
}

// ── reading & verification ──────────────────────────────────────────────────

Result<LogContents> parse_log_lines(const std::vector<std::string>& lines) {
  if (lines.empty()) {
    return make_error(ErrorCode::InvalidEvent, "log is empty; expected a header line");
  }
  LogContents contents;
  const auto header_json = nlohmann::json::parse(lines.front(), nullptr, false);
  if (header_json.is_discarded()) {
    return make_error(ErrorCode::InvalidEvent, "log header line is not valid JSON");
  }
  auto header = header_from_json(header_json);
  if (!header) return header.error();
  contents.header = std::move(header).value();

  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto record = nlohmann::json::parse(lines[i], nullptr, false);
    if (record.is_discarded()) {
      return make_error(ErrorCode::InvalidEvent, "log line is not valid JSON",
                        {{"line", i + 1}});
    }
    auto event = event_from_json(record);
    if (!event) return event.error();
    contents.events.push_back(std::move(event).value());
  }
  return contents;
}

Result<LogContents> read_log_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return make_error(ErrorCode::StorageFailure, "cannot open log file",
                      {{"path", path.string()}});
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    lines.push_back(line);
  }
  return parse_log_lines(lines);
}

Result<LogContents> verify_chain(const LogContents& contents) {
  util::Digest32 expected_prev = util::kZeroDigest;
  std::uint64_t expected_sequence = 1;
  for (const MutationEvent& event : contents.events) {
    if (event.sequence != expected_sequence) {
      return make_error(ErrorCode::ChainBroken, "sequence gap or reorder detected",
                        {{"expected", expected_sequence}, {"sequence", event.sequence}});
    }
    if (event.prev_hash != expected_prev) {
      return make_error(ErrorCode::ChainBroken, "prev_hash does not match preceding event",
                        {{"sequence", event.sequence}});
    }
    const util::Digest32 recomputed = chain_hash(event.prev_hash, event.sequence,
                                                 event.operation,
                                                 canonical_payload(event.payload));
    if (recomputed != event.this_hash) {
      return make_error(ErrorCode::ChainBroken, "event hash mismatch; record was altered",
                        {{"expected", util::to_hex(recomputed)},
                         {"recorded", util::to_hex(event.this_hash)},
                         {"sequence", event.sequence}});
    }
    expected_prev = event.this_hash;
    expected_sequence += 1;
  }
  return contents;
}

Result<LogContents> verify_log_file(const std::filesystem::path& path) {
  auto contents = read_log_file(path);
  if (!contents) return contents.error();
  return verify_chain(contents.value());
}

Result<EventLog> open_log_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    auto log = EventLog::create(std::make_unique<FileLineSink>(path));
    return log;
  }
  auto verified = verify_log_file(path);
  if (!verified) return verified.error();
  const auto& contents = verified.value();
  const util::Digest32 last_hash =
      contents.events.empty() ? util::kZeroDigest : contents.events.back().this_hash;
  const std::uint64_t last_sequence =
      contents.events.empty() ? 0 : contents.events.back().sequence;
  return EventLog::resume(std::make_unique<FileLineSink>(path), contents.header, last_hash,
                          last_sequence);
}

}  // namespace drbac::store
