#pragma once

#include <string>
#include <vector>

namespace drbac::engine {

// Receives one entry per orchestration step so tests can assert the
// delegation order across the manager components.
class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void record(std::string step) = 0;
};

class TraceRecorder final : public TraceSink {
 public:
  void record(std::string step) override { steps_.push_back(std::move(step)); }
  const std::vector<std::string>& steps() const { return steps_; }
  void clear() { steps_.clear(); }

 private:
  std::vector<std::string> steps_;
};

inline void trace(TraceSink* sink, std::string step) {
  if (sink != nullptr) {
    sink->record(std::move(step));
  }
}

}  // namespace drbac::engine
