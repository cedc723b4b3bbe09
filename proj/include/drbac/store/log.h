#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "drbac/store/event.h"

namespace drbac::store {

// Destination for appended log lines. The log writes each record as one line
// (newline-terminated) and requires the sink to make it durable before
// returning; a failed append must leave the previously written lines intact.
class LineSink {
 public:
  virtual ~LineSink() = default;
  virtual Result<void> append_line(const std::string& line) = 0;
};

class FileLineSink final : public LineSink {
 public:
  explicit FileLineSink(std::filesystem::path path);
  Result<void> append_line(const std::string& line) override;

 private:
  std::filesystem::path path_;
};

class MemoryLineSink final : public LineSink {
 public:
  Result<void> append_line(const std::string& line) override;
  const std::vector<std::string>& lines() const { return lines_; }

 private:
  std::vector<std::string> lines_;
};

// First line of every log file. Identifies the format and the hash algorithm
// so a future reader can refuse chains it cannot verify.
struct LogHeader {
  std::uint32_t format_version = 1;
  std::string hash_algorithm = "sha-256";
  std::string magic = "DRBAC_LOG";

  bool operator==(const LogHeader&) const = default;
};

nlohmann::json header_to_json(const LogHeader& header);
Result<LogHeader> header_from_json(const nlohmann::json& value);

// Append-only event log. Owns the chain position (last hash + next sequence)
// and refuses to expose partially written events: append() either persists a
// fully hashed record and advances, or fails leaving the position unchanged.
class EventLog {
 public:
  // Starts an empty log, writing the header line to the sink.
  static Result<EventLog> create(std::unique_ptr<LineSink> sink);

  // Continues an existing log whose verified tail is (last_hash, last_sequence).
  static EventLog resume(std::unique_ptr<LineSink> sink, LogHeader header,
                         util::Digest32 last_hash, std::uint64_t last_sequence);

  Result<MutationEvent> append(const std::string& actor, const std::string& operation,
                               const nlohmann::json& payload, std::uint64_t timestamp_ms);

  const util::Digest32& last_hash() const { return last_hash_; }
  std::uint64_t next_sequence() const { return next_sequence_; }
  const LogHeader& header() const { return header_; }

 private:
  EventLog(std::unique_ptr<LineSink> sink, LogHeader header, util::Digest32 last_hash,
           std::uint64_t next_sequence);

  std::unique_ptr<LineSink> sink_;
  LogHeader header_;
  util::Digest32 last_hash_;
  std::uint64_t next_sequence_;
};

struct LogContents {
  LogHeader header;
  std::vector<MutationEvent> events;
};

// Parses header + events without verifying hashes.
Result<LogContents> parse_log_lines(const std::vector<std::string>& lines);
Result<LogContents> read_log_file(const std::filesystem::path& path);

// Recomputes every link. On failure returns ChainBroken with the first bad
// sequence in the details; on success returns the verified contents.
Result<LogContents> verify_chain(const LogContents& contents);
Result<LogContents> verify_log_file(const std::filesystem::path& path);

// Reads + verifies `path`, then returns a log positioned to append to it.
Result<EventLog> open_log_file(const std::filesystem::path& path);

}  // namespace drbac::store
