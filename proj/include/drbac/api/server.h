#pragma once

#include <memory>
#include <thread>

#include "drbac/api/config.h"
#include "drbac/dispatch/dispatcher.h"
#include "drbac/engine/engine.h"

namespace httplib {
class Server;
}

namespace drbac::api {

// Maps an engine error to the HTTP status its category implies (404 missing,
// 409 conflict, 403 forbidden, 401 unauthenticated, 400 caller fault,
// 500 service fault).
int status_for(ErrorCode code);

// HTTP facade over the engine and the dispatcher. Every endpoint is a thin
// mapping: the response body is the manager-level result or error for the same
// inputs, encoded as canonical JSON.
class ApiServer {
 public:
  ApiServer(engine::Engine& engine, dispatch::Dispatcher& dispatcher, ServiceConfig config);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  // Binds and serves on a background thread. With listen_port == 0 an
  // ephemeral port is chosen; read it back via port().
  Result<void> start();
  // Stops the serve loop and joins the background thread.
  void stop();
  // Asks the serve loop to exit without joining — the only member safe to
  // call from a signal handler.
  void request_stop();
  // Blocks until the serve loop exits.
  void wait();
  int port() const { return port_; }

 private:
  void install_routes();
  Result<engine::AdminScope> authenticate(const std::string& actor,
                                          const std::string& token) const;

  engine::Engine& engine_;
  dispatch::Dispatcher& dispatcher_;
  ServiceConfig config_;
  std::unique_ptr<httplib::Server> http_;
  std::thread serve_thread_;
  int port_ = 0;
};

}  // namespace drbac::api
