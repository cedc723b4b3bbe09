#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "drbac/engine/engine.h"
#include "drbac/model/entities.h"

namespace drbac::dispatch {

// A business function body. Receives the raw call arguments and returns raw
// result bytes; any error or exception is surfaced as HandlerFailure.
using Handler = std::function<Result<model::Bytes>(const model::Bytes&)>;

struct TargetRegistration {
  std::string function_id;
  Handler handler;
  cost::CostUnits metered_cost = 0;
  // Serialized handlers are called under a per-target lock; others must be
  // thread-compatible on their own.
  bool serialized = false;
};

// One journal entry per invoke, allow or deny. The journal is deliberately
// separate from the mutation log: invocations read access-control state but
// never change it.
struct InvocationRecord {
  std::string request_id;
  std::string user_id;
  std::string function_id;
  bool allowed = false;
  model::DecisionReason reason = model::DecisionReason::Matched;
  bool handler_executed = false;
  cost::CostReceipt check_cost;
  cost::CostUnits handler_cost = 0;
  std::uint64_t state_version = 0;
};

nlohmann::json to_json(const InvocationRecord& record);

// Enforcement point in front of registered handlers: an invoke reaches its
// handler only when the permissions manager allows the (user, function) pair.
class Dispatcher {
 public:
  explicit Dispatcher(const engine::Engine& engine) : engine_(engine) {}

  Result<void> register_target(const std::string& function_id, Handler handler,
                               cost::CostUnits metered_cost, bool serialized = false);
  bool has_target(const std::string& function_id) const;

  // Used by the service when no explicit registration exists for an allowed
  // function. Leave unset to get HandlerNotRegistered instead.
  void set_default_handler(Handler handler, cost::CostUnits metered_cost = 0);

  // Deny → AuthorizationDenied carrying the decision reason; the handler does
  // not run. Allow → handler runs exactly once and its bytes are returned.
  Result<model::Bytes> invoke(const model::Request& request, engine::TraceSink* sink = nullptr);

  std::vector<InvocationRecord> journal() const;
  std::uint64_t handler_executions(const std::string& function_id) const;
  std::uint64_t total_handler_executions() const;

 private:
  struct Target {
    Handler handler;
    cost::CostUnits metered_cost = 0;
    bool serialized = false;
    std::shared_ptr<std::mutex> serial_lock;
  };

  const engine::Engine& engine_;
  mutable std::mutex mutex_;
  std::map<std::string, Target> targets_;
  Handler default_handler_;
  cost::CostUnits default_metered_cost_ = 0;
  std::vector<InvocationRecord> journal_;
  std::map<std::string, std::uint64_t> executions_;
  std::set<std::string> seen_request_ids_;
  std::uint64_t next_request_number_ = 1;
};

namespace handlers {

// Returns the call arguments unchanged.
Handler echo();

// Increments a shared counter and returns its decimal value.
Handler counter(std::shared_ptr<std::atomic<std::uint64_t>> count);

}  // namespace handlers

}  // namespace drbac::dispatch
