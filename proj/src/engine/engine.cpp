#include "drbac/engine/engine.h"

#include <chrono>
#include <mutex>

#include "drbac/store/replay.h"

namespace drbac::engine {

namespace {

std::uint64_t now_ms() {
  return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                        std::chrono::system_clock::now().time_since_epoch())
                                        .count());
}

}  // namespace

Engine::Engine(store::EventLog log, EngineState state)
    : mutex_(std::make_unique<std::shared_mutex>()),
      state_(std::move(state)),
      log_(std::move(log)) {}

Result<Engine> Engine::in_memory() {
  return with_sink(std::make_unique<store::MemoryLineSink>());
}

Result<Engine> Engine::with_sink(std::unique_ptr<store::LineSink> sink) {
  auto log = store::EventLog::create(std::move(sink));
  if (!log) return log.error();
  return Engine(std::move(log).value(), EngineState{});
}

Result<Engine> Engine::open(const std::filesystem::path& log_path) {
  if (!std::filesystem::exists(log_path)) {
    auto log = store::EventLog::create(std::make_unique<store::FileLineSink>(log_path));
    if (!log) return log.error();
    Engine engine(std::move(log).value(), EngineState{});
    engine.log_path_ = log_path;
    return engine;
  }
  auto verified = store::verify_log_file(log_path);
  if (!verified) return verified.error();
  auto state = store::replay(verified.value().events);
  if (!state) return state.error();
  const auto& events = verified.value().events;
  const util::Digest32 last = events.empty() ? util::kZeroDigest : events.back().this_hash;
  const std::uint64_t last_seq = events.empty() ? 0 : events.back().sequence;
  Engine engine(store::EventLog::resume(std::make_unique<store::FileLineSink>(log_path),
                                        verified.value().header, last, last_seq),
                std::move(state).value());
  engine.log_path_ = log_path;
  return engine;
}

void Engine::set_cost_schedule(const cost::CostSchedule& schedule) {
  std::unique_lock lock(*mutex_);
  schedule_ = schedule;
}

cost::CostSchedule Engine::cost_schedule() const {
  std::shared_lock lock(*mutex_);
  return schedule_;
}

Result<store::MutationEvent> Engine::commit(const AdminScope& scope, ManagerKind owner,
                                            std::string_view operation,
                                            const nlohmann::json& payload) {
  std::unique_lock lock(*mutex_);
  if (!scope.permits(owner)) {
    return make_error(ErrorCode::ScopeViolation,
                      "admin group '" + scope.admin_group + "' may not drive the " +
                          std::string(manager_kind_name(owner)) + " manager",
                      {{"group", scope.admin_group},
                       {"manager", std::string(manager_kind_name(owner))}});
  }
  EngineState next = state_;
  if (auto applied = apply_operation(next, operation, payload); !applied) {
    return applied.error();
  }
  auto event = log_.append(scope.admin_group, std::string(operation), payload, now_ms());
  if (!event) {
    // Persist failed: published state must not move.
    return event.error();
  }
  state_ = std::move(next);
  return event;
}

// ── role operations ─────────────────────────────────────────────────────────

Result<std::string> Engine::add_role(const AdminScope& scope, const model::Role& role) {
  auto event = commit(scope, ManagerKind::RoleMgr, ops::kRoleAdd, nlohmann::json(role));
  if (!event) return event.error();
  return role.id.value();
}

Result<void> Engine::update_role(const AdminScope& scope, const std::string& role_id,
                                 const std::string& description,
                                 const model::Metadata& metadata) {
  auto id = model::EntityId::parse(model::EntityKind::Role, role_id);
  if (!id) return id.error();
  model::Role role{std::move(id).value(), description, metadata};
  auto event = commit(scope, ManagerKind::RoleMgr, ops::kRoleUpdate, nlohmann::json(role));
  if (!event) return event.error();
  return {};
}

Result<void> Engine::remove_role(const AdminScope& scope, const std::string& role_id) {
  auto event = commit(scope, ManagerKind::RoleMgr, ops::kRoleRemove, {{"id", role_id}});
  if (!event) return event.error();
  return {};
}

// ── function operations ─────────────────────────────────────────────────────

Result<std::string> Engine::register_function(const AdminScope& scope,
                                              const model::FunctionDef& fn) {
  auto event = commit(scope, ManagerKind::FunctionMgr, ops::kFunctionRegister, nlohmann::json(fn));
  if (!event) return event.error();
  return fn.id.value();
}

Result<void> Engine::remove_function(const AdminScope& scope, const std::string& function_id) {
  auto event = commit(scope, ManagerKind::FunctionMgr, ops::kFunctionRemove,
                      {{"id", function_id}});
  if (!event) return event.error();
  return {};
}

// ── user operations ─────────────────────────────────────────────────────────

Result<std::string> Engine::add_user(const AdminScope& scope, const model::User& user) {
  auto event = commit(scope, ManagerKind::UserMgr, ops::kUserAdd, nlohmann::json(user));
  if (!event) return event.error();
  return user.id.value();
}

Result<void> Engine::remove_user(const AdminScope& scope, const std::string& user_id) {
  auto event = commit(scope, ManagerKind::UserMgr, ops::kUserRemove, {{"id", user_id}});
  if (!event) return event.error();
  return {};
}

Result<void> Engine::set_user_active(const AdminScope& scope, const std::string& user_id,
                                     bool active) {
  auto event = commit(scope, ManagerKind::UserMgr, ops::kUserSetActive,
                      {{"active", active}, {"id", user_id}});
  if (!event) return event.error();
  return {};
}

Result<void> Engine::assign_role(const AdminScope& scope, const std::string& user_id,
                                 const std::string& role_id) {
  auto event = commit(scope, ManagerKind::UserMgr, ops::kAssignRole,
                      {{"role_id", role_id}, {"user_id", user_id}});
  if (!event) return event.error();
  return {};
}

Result<void> Engine::revoke_role(const AdminScope& scope, const std::string& user_id,
                                 const std::string& role_id) {
  auto event = commit(scope, ManagerKind::UserMgr, ops::kRevokeRole,
                      {{"role_id", role_id}, {"user_id", user_id}});
  if (!event) return event.error();
  return {};
}

// ── policy operations ───────────────────────────────────────────────────────

Result<void> Engine::bind_policy(const AdminScope& scope, const std::string& function_id,
                                 const std::string& role_id) {
  auto event = commit(scope, ManagerKind::PolicyMgr, ops::kPolicyBind,
                      {{"function_id", function_id}, {"role_id", role_id}});
  if (!event) return event.error();
  return {};
}

Result<void> Engine::unbind_policy(const AdminScope& scope, const std::string& function_id,
                                   const std::string& role_id) {
  auto event = commit(scope, ManagerKind::PolicyMgr, ops::kPolicyUnbind,
                      {{"function_id", function_id}, {"role_id", role_id}});
  if (!event) return event.error();
  return {};
}

Result<void> Engine::set_policy_mode(const AdminScope& scope, const std::string& function_id,
                                     const policy::PolicyMode& mode) {
  auto event = commit(scope, ManagerKind::PolicyMgr, ops::kPolicySetMode,
                      {{"function_id", function_id}, {"mode", nlohmann::json(mode)}});
  if (!event) return event.error();
  return {};
}

Result<ImportSummary> Engine::import_users(const AdminScope& scope, const BulkImport& import) {
  auto event = commit(scope, ManagerKind::UserMgr, ops::kUserImport, import_to_payload(import));
  if (!event) return event.error();
  ImportSummary summary;
  summary.users_created = import.entries.size();
  for (const ImportEntry& entry : import.entries) {
    summary.roles_granted += entry.roles.size();
  }
  return summary;
}

// ── reads ───────────────────────────────────────────────────────────────────

bool Engine::role_exists(const std::string& role_id) const {
  std::shared_lock lock(*mutex_);
  return role_manager::exists(state_, role_id);
}

Result<model::Role> Engine::get_role(const std::string& role_id) const {
  std::shared_lock lock(*mutex_);
  return role_manager::get(state_, role_id);
}

std::vector<model::Role> Engine::list_roles() const {
  std::shared_lock lock(*mutex_);
  return role_manager::list(state_);
}

bool Engine::function_exists(const std::string& function_id) const {
  std::shared_lock lock(*mutex_);
  return function_manager::exists(state_, function_id);
}

Result<model::FunctionDef> Engine::get_function(const std::string& function_id) const {
  std::shared_lock lock(*mutex_);
  return function_manager::get(state_, function_id);
}

std::vector<model::FunctionDef> Engine::list_functions() const {
  std::shared_lock lock(*mutex_);
  return function_manager::list(state_);
}

bool Engine::user_exists(const std::string& user_id) const {
  std::shared_lock lock(*mutex_);
  return user_manager::exists(state_, user_id);
}

Result<model::User> Engine::get_user(const std::string& user_id) const {
  std::shared_lock lock(*mutex_);
  return user_manager::get(state_, user_id);
}

std::vector<model::User> Engine::list_users() const {
  std::shared_lock lock(*mutex_);
  return user_manager::list(state_);
}

Result<model::RoleIdSet> Engine::get_user_roles(const std::string& user_id) const {
  std::shared_lock lock(*mutex_);
  return user_manager::get_user_roles(state_, user_id);
}

Result<std::pair<model::RoleIdSet, policy::PolicyMode>> Engine::get_function_roles(
    const std::string& function_id) const {
  std::shared_lock lock(*mutex_);
  return policy_manager::get_function_roles(state_, function_id);
}

model::Decision Engine::check_authorization(const std::string& user_id,
                                            const std::string& function_id,
                                            TraceSink* sink) const {
  std::shared_lock lock(*mutex_);
  return permissions_manager::check_authorization(state_, user_id, function_id, schedule_, sink);
}

model::Decision Engine::check_authorization_with(const std::string& user_id,
                                                 const std::string& function_id,
                                                 const model::RoleIdSet& extra_roles,
                                                 TraceSink* sink) const {
  std::shared_lock lock(*mutex_);
  return permissions_manager::check_authorization_with(state_, user_id, function_id, extra_roles,
                                                       schedule_, sink);
}

EngineState Engine::state_copy() const {
  std::shared_lock lock(*mutex_);
  return state_;
}

std::uint64_t Engine::version() const {
  std::shared_lock lock(*mutex_);
  return state_.version;
}

std::uint64_t Engine::applied_events() const {
  std::shared_lock lock(*mutex_);
  return log_.next_sequence() - 1;
}

util::Digest32 Engine::last_hash() const {
  std::shared_lock lock(*mutex_);
  return log_.last_hash();
}

store::Snapshot Engine::make_snapshot() const {
  std::shared_lock lock(*mutex_);
  return store::make_snapshot(state_, log_.header(), log_.last_hash(),
                              log_.next_sequence() - 1);
}

}  // namespace drbac::engine
