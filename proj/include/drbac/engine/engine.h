#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "drbac/engine/import.h"
#include "drbac/engine/managers.h"
#include "drbac/engine/state.h"
#include "drbac/engine/trace.h"
#include "drbac/store/log.h"
#include "drbac/store/snapshot.h"

namespace drbac::engine {

// Facade tying the managers to the event log under a single-writer /
// multi-reader contract. Every mutation follows one discipline: check the
// caller's scope, validate against the current state, persist the event, then
// apply — so the log is at all times a complete derivation of memory, and a
// failed persist leaves both unchanged.
class Engine {
 public:
  // Fresh engine logging to memory (tests, ephemeral sessions).
  static Result<Engine> in_memory();

  // Fresh engine logging to a caller-supplied sink.
  static Result<Engine> with_sink(std::unique_ptr<store::LineSink> sink);

  // Creates the log file if absent; otherwise verifies the chain, replays it,
  // and resumes appending at the tail.
  static Result<Engine> open(const std::filesystem::path& log_path);

  Engine(Engine&&) noexcept = default;
  Engine& operator=(Engine&&) noexcept = default;

  void set_cost_schedule(const cost::CostSchedule& schedule);
  cost::CostSchedule cost_schedule() const;

  // ── mutations (serialized; event appended before state changes) ──────────
  Result<std::string> add_role(const AdminScope& scope, const model::Role& role);
  Result<void> update_role(const AdminScope& scope, const std::string& role_id,
                           const std::string& description, const model::Metadata& metadata);
  Result<void> remove_role(const AdminScope& scope, const std::string& role_id);

  Result<std::string> register_function(const AdminScope& scope, const model::FunctionDef& fn);
  Result<void> remove_function(const AdminScope& scope, const std::string& function_id);

  Result<std::string> add_user(const AdminScope& scope, const model::User& user);
  Result<void> remove_user(const AdminScope& scope, const std::string& user_id);
  Result<void> set_user_active(const AdminScope& scope, const std::string& user_id, bool active);

  Result<void> assign_role(const AdminScope& scope, const std::string& user_id,
                           const std::string& role_id);
  Result<void> revoke_role(const AdminScope& scope, const std::string& user_id,
                           const std::string& role_id);

  Result<void> bind_policy(const AdminScope& scope, const std::string& function_id,
                           const std::string& role_id);
  Result<void> unbind_policy(const AdminScope& scope, const std::string& function_id,
                             const std::string& role_id);
  Result<void> set_policy_mode(const AdminScope& scope, const std::string& function_id,
                               const policy::PolicyMode& mode);

  Result<ImportSummary> import_users(const AdminScope& scope, const BulkImport& import);

  // ── reads (concurrent; each observes one consistent version) ─────────────
  bool role_exists(const std::string& role_id) const;
  Result<model::Role> get_role(const std::string& role_id) const;
  std::vector<model::Role> list_roles() const;

  bool function_exists(const std::string& function_id) const;
  Result<model::FunctionDef> get_function(const std::string& function_id) const;
  std::vector<model::FunctionDef> list_functions() const;

  bool user_exists(const std::string& user_id) const;
  Result<model::User> get_user(const std::string& user_id) const;
  std::vector<model::User> list_users() const;

  Result<model::RoleIdSet> get_user_roles(const std::string& user_id) const;
  Result<std::pair<model::RoleIdSet, policy::PolicyMode>> get_function_roles(
      const std::string& function_id) const;

  model::Decision check_authorization(const std::string& user_id, const std::string& function_id,
                                      TraceSink* sink = nullptr) const;

  // Hypothetical check: evaluates as if the user additionally held
  // `extra_roles`. Never touches state or the log.
  model::Decision check_authorization_with(const std::string& user_id,
                                           const std::string& function_id,
                                           const model::RoleIdSet& extra_roles,
                                           TraceSink* sink = nullptr) const;

  EngineState state_copy() const;
  std::uint64_t version() const;
  std::uint64_t applied_events() const;
  util::Digest32 last_hash() const;
  store::Snapshot make_snapshot() const;
  std::optional<std::filesystem::path> log_path() const { return log_path_; }

 private:
  Engine(store::EventLog log, EngineState state);

  // Scope check → dry-apply on a copy → persist → publish the copy.
  Result<store::MutationEvent> commit(const AdminScope& scope, ManagerKind owner,
                                      std::string_view operation,
                                      const nlohmann::json& payload);

  mutable std::unique_ptr<std::shared_mutex> mutex_;
  EngineState state_;
  store::EventLog log_;
  cost::CostSchedule schedule_;
  std::optional<std::filesystem::path> log_path_;
};

}  // namespace drbac::engine
