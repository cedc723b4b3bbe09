#include "drbac/api/server.h"

#include <httplib.h>

#include "drbac/store/log.h"
#include "drbac/util/base64.h"

namespace drbac::api {

namespace {

constexpr const char* kActorHeader = "X-Drbac-Actor";
constexpr const char* kTokenHeader = "X-Drbac-Token";

void reply_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, const Error& error) {
  reply_json(res, status_for(error.code), error_to_json(error));
}

Result<nlohmann::json> parse_body(const httplib::Request& req) {
  auto body = nlohmann::json::parse(req.body, nullptr, false);
  if (body.is_discarded()) {
    return make_error(ErrorCode::ParseError, "request body is not valid JSON");
  }
  return body;
}

Result<std::string> body_string(const nlohmann::json& body, const char* field) {
  if (!body.is_object() || !body.contains(field) || !body[field].is_string()) {
    return make_error(ErrorCode::BadRequest,
                      std::string("body missing string field '") + field + "'");
  }
  return body[field].get<std::string>();
}

}  // namespace

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::RoleNotFound:
    case ErrorCode::FunctionNotFound:
    case ErrorCode::UserNotFound:
    case ErrorCode::AssignmentNotFound:
    case ErrorCode::BindingNotFound:
    case ErrorCode::HandlerNotRegistered:
      return 404;
    case ErrorCode::DuplicateRole:
    case ErrorCode::DuplicateFunction:
    case ErrorCode::DuplicateUser:
    case ErrorCode::DuplicateExternalRef:
    case ErrorCode::DuplicateAssignment:
    case ErrorCode::DuplicateBinding:
    case ErrorCode::DuplicateRegistration:
    case ErrorCode::DuplicateRequest:
    case ErrorCode::DuplicateUserInImport:
    case ErrorCode::RoleInUse:
    case ErrorCode::FunctionInUse:
    case ErrorCode::UserHasRoles:
    case ErrorCode::ThresholdViolation:
      return 409;
    case ErrorCode::ScopeViolation:
    case ErrorCode::AuthorizationDenied:
      return 403;
    case ErrorCode::UnknownActor:
    case ErrorCode::InvalidToken:
      return 401;
    case ErrorCode::StorageFailure:
    case ErrorCode::ChainBroken:
    case ErrorCode::SnapshotCorrupt:
    case ErrorCode::HandlerFailure:
    case ErrorCode::InternalError:
      return 500;
    default:
      return 400;
  }
}

ApiServer::ApiServer(engine::Engine& engine, dispatch::Dispatcher& dispatcher,
                     ServiceConfig config)
    : engine_(engine), dispatcher_(dispatcher), config_(std::move(config)) {}

ApiServer::~ApiServer() { stop(); }

Result<engine::AdminScope> ApiServer::authenticate(const std::string& actor,
                                                   const std::string& token) const {
  const auto it = config_.scopes.find(actor);
  if (actor.empty() || it == config_.scopes.end()) {
    return make_error(ErrorCode::UnknownActor, "actor is not a configured admin group",
                      {{"actor", actor}});
  }
  if (token != it->second.token) {
    return make_error(ErrorCode::InvalidToken, "token does not match actor '" + actor + "'",
                      {{"actor", actor}});
  }
  return it->second.scope;
}

void ApiServer::install_routes() {
  auto& http = *http_;

  const auto with_scope =
      [this](const httplib::Request& req, httplib::Response& res,
             const std::function<Result<nlohmann::json>(const engine::AdminScope&)>& body) {
        auto scope = authenticate(req.get_header_value(kActorHeader),
                                  req.get_header_value(kTokenHeader));
        if (!scope) {
          reply_error(res, scope.error());
          return;
        }
        auto outcome = body(scope.value());
        if (!outcome) {
          reply_error(res, outcome.error());
          return;
        }
        reply_json(res, 200, outcome.value());
      };

  http.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
    reply_json(res, 200,
               {{"events", engine_.applied_events()},
                {"status", "ok"},
                {"version", engine_.version()}});
  });

  // ── roles ─────────────────────────────────────────────────────────────────
  http.Get("/roles", [this](const httplib::Request&, httplib::Response& res) {
    reply_json(res, 200, nlohmann::json(engine_.list_roles()));
  });
  http.Post("/roles", [this, with_scope](const httplib::Request& req, httplib::Response& res) {
    with_scope(req, res, [&](const engine::AdminScope& scope) -> Result<nlohmann::json> {
      auto body = parse_body(req);
      if (!body) return body.error();
      auto role = model::role_from_json(body.value());
      if (!role) return role.error();
      auto id = engine_.add_role(scope, role.value());
      if (!id) return id.error();
      return nlohmann::json{{"id", id.value()}};
    });
  });
  http.Delete("/roles/:id",
              [this, with_scope](const httplib::Request& req, httplib::Response& res) {
    with_scope(req, res, [&](const engine::AdminScope& scope) -> Result<nlohmann::json> {
      if (auto removed = engine_.remove_role(scope, req.path_params.at("id")); !removed) {
        return removed.error();
      }
      return nlohmann::json{{"removed", req.path_params.at("id")}};
    });
  });

  // ── users ─────────────────────────────────────────────────────────────────
  http.Get("/users", [this](const httplib::Request&, httplib::Response& res) {
    reply_json(res, 200, nlohmann::json(engine_.list_users()));
  });
  http.Post("/users", [this, with_scope](const httplib::Request& req, httplib::Response& res) {
    with_scope(req, res, [&](const engine::AdminScope& scope) -> Result<nlohmann::json> {
      auto body = parse_body(req);
      if (!body) return body.error();
      auto user = model::user_from_json(body.value());
      if (!user) return user.error();
      auto id = engine_.add_user(scope, user.value());
      if (!id) return id.error();
      return nlohmann::json{{"id", id.value()}};
    });
  });
  http.Delete("/users/:id",
              [this, with_scope](const httplib::Request& req, httplib::Response& res) {
    with_scope(req, res, [&](const engine::AdminScope& scope) -> Result<nlohmann::json> {
      if (auto removed = engine_.remove_user(scope, req.path_params.at("id")); !removed) {
        return removed.error();
      }
      return nlohmann::json{{"removed", req.path_params.at("id")}};
    });
  });
  http.Put("/users/:id/active",
           [this, with_scope](const httplib::Request& req, httplib::Response& res) {
    with_scope(req, res, [&](const engine::AdminScope& scope) -> Result<nlohmann::json> {
      auto body = parse_body(req);
      if (!body) return body.error();
      if (!body.value().is_object() || !body.value().contains("active") ||
          !body.value()["active"].is_boolean()) {
        return make_error(ErrorCode::BadRequest, "body missing boolean field 'active'");
      }
      const bool active = body.value()["active"].get<bool>();
      if (auto set = engine_.set_user_active(scope, req.path_params.at("id"), active); !set) {
        return set.error();
      }
      return nlohmann::json{{"active", active}, {"id", req.path_params.at("id")}};
    });
  });

  // ── user-role assignments ─────────────────────────────────────────────────
  http.Get("/users/:id/roles", [this](const httplib::Request& req, httplib::Response& res) {
    auto roles = engine_.get_user_roles(req.path_params.at("id"));
    if (!roles) {
      reply_error(res, roles.error());
      return;
    }
    reply_json(res, 200, nlohmann::json(roles.value()));
  });
  http.Post("/users/:id/roles",
            [this, with_scope](const httplib::Request& req, httplib::Response& res) {
    with_scope(req, res, [&](const engine::AdminScope& scope) -> Result<nlohmann::json> {
      auto body = parse_body(req);
      if (!body) return body.error();
      auto role_id = body_string(body.value(), "role_id");
      if (!role_id) return role_id.error();
      if (auto granted = engine_.assign_role(scope, req.path_params.at("id"), role_id.value());
          !granted) {
        return granted.error();
      }
      return nlohmann::json{{"role_id", role_id.value()}, {"user_id", req.path_params.at("id")}};
    });
  });
  http.Delete("/users/:id/roles/:rid",
              [this, with_scope](const httplib::Request& req, httplib::Response& res) {
    with_scope(req, res, [&](const engine::AdminScope& scope) -> Result<nlohmann::json> {
      if (auto revoked = engine_.revoke_role(scope, req.path_params.at("id"),
                                             req.path_params.at("rid"));
          !revoked) {
        return revoked.error();
      }
      return nlohmann::json{{"revoked", req.path_params.at("rid")},
                            {"user_id", req.path_params.at("id")}};
    });
  });

  // ── functions ─────────────────────────────────────────────────────────────
  http.Get("/functions", [this](const httplib::Request&, httplib::Response& res) {
    reply_json(res, 200, nlohmann::json(engine_.list_functions()));
  });
  http.Post("/functions",
            [this, with_scope](const httplib::Request& req, httplib::Response& res) {
    with_scope(req, res, [&](const engine::AdminScope& scope) -> Result<nlohmann::json> {
      auto body = parse_body(req);
      if (!body) return body.error();
      auto fn = model::function_from_json(body.value());
      if (!fn) return fn.error();
      auto id = engine_.register_function(scope, fn.value());
      if (!id) return id.error();
      return nlohmann::json{{"id", id.value()}};
    });
  });
  http.Delete("/functions/:id",
              [this, with_scope](const httplib::Request& req, httplib::Response& res) {
    with_scope(req, res, [&](const engine::AdminScope& scope) -> Result<nlohmann::json> {
      if (auto removed = engine_.remove_function(scope, req.path_params.at("id")); !removed) {
        return removed.error();
      }
      return nlohmann::json{{"removed", req.path_params.at("id")}};
    });
  });

  // ── policies ──────────────────────────────────────────────────────────────
  http.Get("/policies/:fid", [this](const httplib::Request& req, httplib::Response& res) {
    auto policy = engine_.get_function_roles(req.path_params.at("fid"));
    if (!policy) {
      reply_error(res, policy.error());
      return;
    }
    reply_json(res, 200,
               {{"function_id", req.path_params.at("fid")},
                {"mode", nlohmann::json(policy.value().second)},
                {"required_roles", policy.value().first}});
  });
  http.Post("/policies/:fid/roles",
            [this, with_scope](const httplib::Request& req, httplib::Response& res) {
    with_scope(req, res, [&](const engine::AdminScope& scope) -> Result<nlohmann::json> {
      auto body = parse_body(req);
      if (!body) return body.error();
      auto role_id = body_string(body.value(), "role_id");
      if (!role_id) return role_id.error();
      if (auto bound = engine_.bind_policy(scope, req.path_params.at("fid"), role_id.value());
          !bound) {
        return bound.error();
      }
      return nlohmann::json{{"function_id", req.path_params.at("fid")},
                            {"role_id", role_id.value()}};
    });
  });
  http.Delete("/policies/:fid/roles/:rid",
              [this, with_scope](const httplib::Request& req, httplib::Response& res) {
    with_scope(req, res, [&](const engine::AdminScope& scope) -> Result<nlohmann::json> {
      if (auto unbound = engine_.unbind_policy(scope, req.path_params.at("fid"),
                                               req.path_params.at("rid"));
          !unbound) {
        return unbound.error();
      }
      return nlohmann::json{{"function_id", req.path_params.at("fid")},
                            {"unbound", req.path_params.at("rid")}};
    });
  });
  http.Put("/policies/:fid/mode",
           [this, with_scope](const httplib::Request& req, httplib::Response& res) {
    with_scope(req, res, [&](const engine::AdminScope& scope) -> Result<nlohmann::json> {
      auto body = parse_body(req);
      if (!body) return body.error();
      if (!body.value().is_object() || !body.value().contains("mode")) {
        return make_error(ErrorCode::BadRequest, "body missing field 'mode'");
      }
      const nlohmann::json& mode_field = body.value()["mode"];
      auto mode = mode_field.is_string()
                      ? policy::PolicyMode::parse(mode_field.get<std::string>())
                      : policy::mode_from_json(mode_field);
      if (!mode) return mode.error();
      if (auto set = engine_.set_policy_mode(scope, req.path_params.at("fid"), mode.value());
          !set) {
        return set.error();
      }
      return nlohmann::json{{"function_id", req.path_params.at("fid")},
                            {"mode", nlohmann::json(mode.value())}};
    });
  });

  // ── decisions & invocation ────────────────────────────────────────────────
  http.Get("/check", [this](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("user") || !req.has_param("function")) {
      reply_error(res, make_error(ErrorCode::BadRequest,
                                  "query parameters 'user' and 'function' are required"));
      return;
    }
    const model::Decision decision = engine_.check_authorization(
        req.get_param_value("user"), req.get_param_value("function"));
    // A deny is still a successful decision: always 200 here.
    reply_json(res, 200, nlohmann::json(decision));
  });

  http.Post("/invoke", [this](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req);
    if (!body) {
      reply_error(res, body.error());
      return;
    }
    auto user_id = body_string(body.value(), "user_id");
    auto function_id = body_string(body.value(), "function_id");
    if (!user_id) {
      reply_error(res, user_id.error());
      return;
    }
    if (!function_id) {
      reply_error(res, function_id.error());
      return;
    }
    model::Request request;
    request.user_id = user_id.value();
    request.function_id = function_id.value();
    if (body.value().contains("request_id") && body.value()["request_id"].is_string()) {
      request.request_id = body.value()["request_id"].get<std::string>();
    }
    if (body.value().contains("call_args") && body.value()["call_args"].is_string()) {
      auto args = util::base64_decode(body.value()["call_args"].get<std::string>());
      if (!args) {
        reply_error(res, make_error(ErrorCode::BadRequest, "call_args is not valid base64"));
        return;
      }
      request.call_args = std::move(*args);
    }
    auto outcome = dispatcher_.invoke(request);
    if (!outcome) {
      reply_error(res, outcome.error());
      return;
    }
    reply_json(res, 200,
               {{"result", util::base64_encode(outcome.value())},
                {"user_id", request.user_id},
                {"function_id", request.function_id}});
  });

  // ── bulk import ───────────────────────────────────────────────────────────
  http.Post("/import", [this, with_scope](const httplib::Request& req, httplib::Response& res) {
    with_scope(req, res, [&](const engine::AdminScope& scope) -> Result<nlohmann::json> {
      auto import = engine::parse_bulk_import(req.body);
      if (!import) return import.error();
      auto summary = engine_.import_users(scope, import.value());
      if (!summary) return summary.error();
      return nlohmann::json(summary.value());
    });
  });

  // ── audit ─────────────────────────────────────────────────────────────────
  http.Get("/audit/verify", [this](const httplib::Request&, httplib::Response& res) {
    const auto path = engine_.log_path();
    if (!path) {
      reply_json(res, 200,
                 {{"events", engine_.applied_events()},
                  {"last_hash", util::to_hex(engine_.last_hash())},
                  {"note", "log is in-memory for this session"},
                  {"ok", true}});
      return;
    }
    auto verified = store::verify_log_file(*path);
    if (!verified) {
      reply_json(res, 200, {{"error", error_to_json(verified.error())}, {"ok", false}});
      return;
    }
    const auto& events = verified.value().events;
    reply_json(res, 200,
               {{"events", events.size()},
                {"last_hash", util::to_hex(events.empty() ? util::kZeroDigest
                                                          : events.back().this_hash)},
                {"ok", true}});
  });
}

Result<void> ApiServer::start() {
  http_ = std::make_unique<httplib::Server>();
  install_routes();
  if (config_.listen_port == 0) {
    port_ = http_->bind_to_any_port(config_.listen_host);
    if (port_ <= 0) {
      return make_error(ErrorCode::InternalError, "failed to bind an ephemeral port",
                        {{"host", config_.listen_host}});
    }
  } else {
    if (!http_->bind_to_port(config_.listen_host, config_.listen_port)) {
      return make_error(ErrorCode::InternalError, "failed to bind listen address",
                        {{"host", config_.listen_host}, {"port", config_.listen_port}});
    }
    port_ = config_.listen_port;
  }
  serve_thread_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
  return {};
}

void ApiServer::stop() {
  if (http_) {
    http_->stop();
  }
  if (serve_thread_.joinable()) {
    serve_thread_.join();
  }
}

void ApiServer::request_stop() {
  if (http_) {
    http_->stop();
  }
}

void ApiServer::wait() {
  if (serve_thread_.joinable()) {
    serve_thread_.join();
  }
}

}  // namespace drbac::api
