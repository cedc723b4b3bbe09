#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "drbac/cost/receipt.h"
#include "drbac/engine/state.h"
#include "drbac/result.h"

namespace drbac::api {

// One configured admin group: the bearer token it presents and the managers
// its scope may drive.
struct ScopeEntry {
  std::string token;
  engine::AdminScope scope;
};

struct ServiceConfig {
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  std::filesystem::path log_path;  // empty → ephemeral in-memory log
  std::map<std::string, ScopeEntry> scopes;
  cost::CostSchedule schedule;
};

// Key=value format, one entry per line, '#' starts a comment:
//
//   listen = 127.0.0.1:8080
//   log = /var/lib/drbac/events.log
//   scope.ops.token = s3cret
//   scope.ops.managers = role,user          # or: all
//   cost.read = 100
//   cost.write = 500
//   cost.compare = 3
//   cost.hash = 30
//   cost.deploy_dynamic = 9536190
//   cost.deploy_static = 359268
//
// Manager names: role, function, user, policy. A scope needs both its token
// and a non-empty manager list. Unknown keys are rejected.
Result<ServiceConfig> parse_config_text(const std::string& text);
Result<ServiceConfig> load_config_file(const std::filesystem::path& path);

// DRBAC_ADDR overrides listen host:port; DRBAC_LOG overrides the log path.
void apply_env_overrides(ServiceConfig& config);

Result<std::pair<std::string, int>> parse_listen_address(const std::string& value);

}  // namespace drbac::api
