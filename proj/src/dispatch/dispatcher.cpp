#include "drbac/dispatch/dispatcher.h"

#include "drbac/util/base64.h"

namespace drbac::dispatch {

nlohmann::json to_json(const InvocationRecord& record) {
  return nlohmann::json{{"allowed", record.allowed},
                        {"check_cost", nlohmann::json(record.check_cost)},
                        {"function_id", record.function_id},
                        {"handler_cost", record.handler_cost},
                        {"handler_executed", record.handler_executed},
                        {"reason", std::string(model::decision_reason_name(record.reason))},
                        {"request_id", record.request_id},
                        {"state_version", record.state_version},
                        {"user_id", record.user_id}};
}

Result<void> Dispatcher::register_target(const std::string& function_id, Handler handler,
                                         cost::CostUnits metered_cost, bool serialized) {
  if (!engine_.function_exists(function_id)) {
    return make_error(ErrorCode::FunctionNotFound, "function not found: " + function_id,
                      {{"id", function_id}});
  }
  std::lock_guard lock(mutex_);
  if (targets_.contains(function_id)) {
    return make_error(ErrorCode::DuplicateRegistration,
                      "handler already registered for " + function_id, {{"id", function_id}});
  }
  Target target;
  target.handler = std::move(handler);
  target.metered_cost = metered_cost;
  target.serialized = serialized;
  if (serialized) {
    target.serial_lock = std::make_shared<std::mutex>();
  }
  targets_.emplace(function_id, std::move(target));
  return {};
}

bool Dispatcher::has_target(const std::string& function_id) const {
  std::lock_guard lock(mutex_);
  return targets_.contains(function_id);
}

void Dispatcher::set_default_handler(Handler handler, cost::CostUnits metered_cost) {
  std::lock_guard lock(mutex_);
  default_handler_ = std::move(handler);
  default_metered_cost_ = metered_cost;
}

Result<model::Bytes> Dispatcher::invoke(const model::Request& request,
                                        engine::TraceSink* sink) {
  std::string request_id = request.request_id;
  {
    std::lock_guard lock(mutex_);
    if (request_id.empty()) {
      // Minted ids must never collide with ids callers chose themselves.
      do {
        request_id = "req-" + std::to_string(next_request_number_++);
      } while (seen_request_ids_.contains(request_id));
    }
    if (!seen_request_ids_.insert(request_id).second) {
      return make_error(ErrorCode::DuplicateRequest,
                        "request_id already processed: " + request_id,
                        {{"request_id", request_id}});
    }
  }

  engine::trace(sink, "target:" + request.function_id);
  const model::Decision decision =
      engine_.check_authorization(request.user_id, request.function_id, sink);

  InvocationRecord record;
  record.request_id = request_id;
  record.user_id = request.user_id;
  record.function_id = request.function_id;
  record.allowed = decision.allowed;
  record.reason = decision.reason;
  record.check_cost = decision.cost;
  record.state_version = engine_.version();

  if (!decision.allowed) {
    engine::trace(sink, "authorization_error:" + std::string(model::decision_reason_name(decision.reason)));
    {
      std::lock_guard lock(mutex_);
      journal_.push_back(record);
    }
    return make_error(ErrorCode::AuthorizationDenied,
                      "authorization denied for " + request.user_id + " on " +
                          request.function_id,
                      {{"function_id", request.function_id},
                       {"reason", std::string(model::decision_reason_name(decision.reason))},
                       {"request_id", request_id},
                       {"user_id", request.user_id}});
  }

  Handler handler;
  cost::CostUnits metered_cost = 0;
  std::shared_ptr<std::mutex> serial_lock;
  {
    std::lock_guard lock(mutex_);
    const auto it = targets_.find(request.function_id);
    if (it != targets_.end()) {
      handler = it->second.handler;
      metered_cost = it->second.metered_cost;
      serial_lock = it->second.serial_lock;
    } else if (default_handler_) {
      handler = default_handler_;
      metered_cost = default_metered_cost_;
    }
  }
  if (!handler) {
    std::lock_guard lock(mutex_);
    journal_.push_back(record);
    return make_error(ErrorCode::HandlerNotRegistered,
                      "no handler registered for " + request.function_id,
                      {{"id", request.function_id}, {"request_id", request_id}});
  }

  // The handler runs outside the dispatcher lock so invokes stay concurrent.
  Result<model::Bytes> outcome = make_error(ErrorCode::HandlerFailure, "handler threw");
  try {
    if (serial_lock) {
      std::lock_guard serial(*serial_lock);
      outcome = handler(request.call_args);
    } else {
      outcome = handler(request.call_args);
    }
  } catch (const std::exception& ex) {
    outcome = make_error(ErrorCode::HandlerFailure,
                         std::string("handler threw: ") + ex.what(),
                         {{"id", request.function_id}, {"request_id", request_id}});
  }

  record.handler_executed = true;
  record.handler_cost = metered_cost;
  {
    std::lock_guard lock(mutex_);
    journal_.push_back(record);
    executions_[request.function_id] += 1;
  }

  engine::trace(sink, "handler:" + request.function_id);
  if (!outcome) {
    Error error = outcome.error();
    if (error.code != ErrorCode::HandlerFailure) {
      // Authorization already passed; a failing handler is never re-classified.
      error = make_error(ErrorCode::HandlerFailure, error.message,
                         {{"id", request.function_id}, {"request_id", request_id}});
    }
    return error;
  }
  return outcome;
}

std::vector<InvocationRecord> Dispatcher::journal() const {
  std::lock_guard lock(mutex_);
  return journal_;
}

std::uint64_t Dispatcher::handler_executions(const std::string& function_id) const {
  std::lock_guard lock(mutex_);
  const auto it = executions_.find(function_id);
  return it == executions_.end() ? 0 : it->second;
}

std::uint64_t Dispatcher::total_handler_executions() const {
  std::lock_guard lock(mutex_);
  std::uint64_t total = 0;
  for (const auto& [_, count] : executions_) {
    total += count;
  }
  return total;
}

namespace handlers {

Handler echo() {
  return [](const model::Bytes& args) -> Result<model::Bytes> { return args; };
}

Handler counter(std::shared_ptr<std::atomic<std::uint64_t>> count) {
  return [count](const model::Bytes&) -> Result<model::Bytes> {
    const std::uint64_t value = count->fetch_add(1) + 1;
    const std::string text = std::to_string(value);
    return model::Bytes(text.begin(), text.end());
  };
}

}  // namespace handlers

}  // namespace drbac::dispatch
