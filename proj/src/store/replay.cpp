#include "drbac/store/replay.h"

#include <algorithm>

#include "drbac/engine/managers.h"
#include "drbac/store/logic_v2.h"

namespace drbac::store {

const LogicRegistry& LogicRegistry::builtin() {
  static const LogicRegistry registry = [] {
    LogicRegistry r;
    (void)r.register_logic("v1", [](engine::EngineState& state, std::string_view operation,
                                    const nlohmann::json& payload) {
      return engine::apply_operation(state, operation, payload);
    });
    (void)r.register_logic("v2", [](engine::EngineState& state, std::string_view operation,
                                    const nlohmann::json& payload) {
      return logic_v2::apply_operation_v2(state, operation, payload);
    });
    return r;
  }();
  return registry;
}

Result<void> LogicRegistry::register_logic(const std::string& version, ApplyFn fn) {
  if (logics_.contains(version)) {
    return make_error(ErrorCode::DuplicateRegistration,
                      "logic version already registered: " + version, {{"version", version}});
  }
  logics_.emplace(version, std::move(fn));
  return {};
}

Result<ApplyFn> LogicRegistry::lookup(const std::string& version) const {
  const auto it = logics_.find(version);
  if (it == logics_.end()) {
    return make_error(ErrorCode::UnknownLogicVersion, "unknown logic version: " + version,
                      {{"version", version}});
  }
  return it->second;
}

std::vector<std::string> LogicRegistry::versions() const {
  std::vector<std::string> out;
  out.reserve(logics_.size());
  for (const auto& [version, _] : logics_) {
    out.push_back(version);
  }
  return out;
}

Result<engine::EngineState> replay_prefix(const std::vector<MutationEvent>& events,
                                          std::size_t count, const std::string& logic_version) {
  auto logic = LogicRegistry::builtin().lookup(logic_version);
  if (!logic) return logic.error();
  const ApplyFn& apply = logic.value();

  engine::EngineState state;
  const std::size_t limit = std::min(count, events.size());
  for (std::size_t i = 0; i < limit; ++i) {
    const MutationEvent& event = events[i];
    if (auto applied = apply(state, event.operation, event.payload); !applied) {
      Error error = applied.error();
      error.details["sequence"] = event.sequence;
      return error;
    }
  }
  return state;
}

Result<engine::EngineState> replay(const std::vector<MutationEvent>& events,
                                   const std::string& logic_version) {
  return replay_prefix(events, events.size(), logic_version);
}

}  // namespace drbac::store
