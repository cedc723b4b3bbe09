#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "drbac/engine/state.h"
#include "drbac/store/event.h"

namespace drbac::store {

// A replay logic is a pure state-transition function. The log never changes;
// upgrading the system means registering a new logic version and replaying
// the same events through it.
using ApplyFn =
    std::function<Result<void>(engine::EngineState&, std::string_view, const nlohmann::json&)>;

class LogicRegistry {
 public:
  // Registry preloaded with "v1" (current semantics) and "v2" (the
  // independently written successor used to prove upgrade-without-migration).
  static const LogicRegistry& builtin();

  Result<void> register_logic(const std::string& version, ApplyFn fn);
  Result<ApplyFn> lookup(const std::string& version) const;
  std::vector<std::string> versions() const;

 private:
  std::map<std::string, ApplyFn> logics_;
};

// Replays events in order through the named logic version, starting from an
// empty state. Stops at the first failing event with its sequence attached.
Result<engine::EngineState> replay(const std::vector<MutationEvent>& events,
                                   const std::string& logic_version = "v1");

// Replays only the first `count` events (a checkpoint state).
Result<engine::EngineState> replay_prefix(const std::vector<MutationEvent>& events,
                                          std::size_t count,
                                          const std::string& logic_version = "v1");

}  // namespace drbac::store
