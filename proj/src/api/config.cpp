#include "drbac/api/config.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace drbac::api {

namespace {

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

Result<std::uint64_t> parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t consumed = 0;
    const unsigned long long parsed = std::stoull(value, &consumed);
    if (consumed != value.size()) throw std::invalid_argument(value);
    return static_cast<std::uint64_t>(parsed);
  } catch (const std::exception&) {
    return make_error(ErrorCode::ParseError, "config value for '" + key + "' is not an integer",
                      {{"key", key}, {"value", value}});
  }
}

Result<engine::ManagerKind> parse_manager(const std::string& name) {
  if (name == "role") return engine::ManagerKind::RoleMgr;
  if (name == "function") return engine::ManagerKind::FunctionMgr;
  if (name == "user") return engine::ManagerKind::UserMgr;
  if (name == "policy") return engine::ManagerKind::PolicyMgr;
  return make_error(ErrorCode::ParseError, "unknown manager name: " + name, {{"value", name}});
}

}  // namespace

Result<std::pair<std::string, int>> parse_listen_address(const std::string& value) {
  const auto colon = value.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == value.size()) {
    return make_error(ErrorCode::ParseError, "listen address must be host:port",
                      {{"value", value}});
  }
  const std::string host = value.substr(0, colon);
  auto port = parse_u64("listen", value.substr(colon + 1));
  if (!port) return port.error();
  if (port.value() == 0 || port.value() > 65535) {
    // Port 0 is allowed for tests via the explicit ServiceConfig field only.
    return make_error(ErrorCode::ParseError, "listen port out of range", {{"value", value}});
  }
  return std::pair<std::string, int>{host, static_cast<int>(port.value())};
}

Result<ServiceConfig> parse_config_text(const std::string& text) {
  ServiceConfig config;
  std::map<std::string, std::set<engine::ManagerKind>> scope_managers;
  std::map<std::string, std::string> scope_tokens;

  std::istringstream in(text);
  std::string raw_line;
  std::size_t line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    std::string line = raw_line;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto equals = line.find('=');
    if (equals == std::string::npos) {
      return make_error(ErrorCode::ParseError, "config line is not key = value",
                        {{"line", line_no}});
    }
    const std::string key = trim(line.substr(0, equals));
    const std::string value = trim(line.substr(equals + 1));

    if (key == "listen") {
      auto listen = parse_listen_address(value);
      if (!listen) return listen.error();
      config.listen_host = listen.value().first;
      config.listen_port = listen.value().second;
    } else if (key == "log") {
      config.log_path = value;
    } else if (key.rfind("cost.", 0) == 0) {
      auto amount = parse_u64(key, value);
      if (!amount) return amount.error();
      if (amount.value() == 0) {
        return make_error(ErrorCode::ParseError, "cost entries must be > 0", {{"key", key}});
      }
      const std::string field = key.substr(5);
      if (field == "read") {
        config.schedule.read_cost = amount.value();
      } else if (field == "write") {
        config.schedule.write_cost = amount.value();
      } else if (field == "compare") {
        config.schedule.compare_cost = amount.value();
      } else if (field == "hash") {
        config.schedule.hash_cost = amount.value();
      } else if (field == "deploy_dynamic") {
        config.schedule.deploy_base_dynamic = amount.value();
      } else if (field == "deploy_static") {
        config.schedule.deploy_base_static = amount.value();
      } else {
        return make_error(ErrorCode::ParseError, "unknown config key: " + key,
                          {{"key", key}, {"line", line_no}});
      }
    } else if (key.rfind("scope.", 0) == 0) {
      const std::string rest = key.substr(6);
      const auto dot = rest.rfind('.');
      if (dot == std::string::npos || dot == 0) {
        return make_error(ErrorCode::ParseError, "scope keys are scope.<group>.token|managers",
                          {{"key", key}, {"line", line_no}});
      }
      const std::string group = rest.substr(0, dot);
      const std::string field = rest.substr(dot + 1);
      if (field == "token") {
        scope_tokens[group] = value;
      } else if (field == "managers") {
        std::set<engine::ManagerKind> managers;
        std::istringstream list(value);
        std::string name;
        while (std::getline(list, name, ',')) {
          name = trim(name);
          if (name.empty()) continue;
          if (name == "all") {
            managers = {engine::ManagerKind::RoleMgr, engine::ManagerKind::FunctionMgr,
                        engine::ManagerKind::UserMgr, engine::ManagerKind::PolicyMgr};
            continue;
          }
          auto manager = parse_manager(name);
          if (!manager) return manager.error();
          managers.insert(manager.value());
        }
        if (managers.empty()) {
          return make_error(ErrorCode::ParseError,
                            "scope manager list must name at least one manager",
                            {{"key", key}, {"line", line_no}});
        }
        scope_managers[group] = std::move(managers);
      } else {
        return make_error(ErrorCode::ParseError, "unknown config key: " + key,
                          {{"key", key}, {"line", line_no}});
      }
    } else {
      return make_error(ErrorCode::ParseError, "unknown config key: " + key,
                        {{"key", key}, {"line", line_no}});
    }
  }

  for (const auto& [group, managers] : scope_managers) {
    const auto token = scope_tokens.find(group);
    if (token == scope_tokens.end()) {
      return make_error(ErrorCode::ParseError, "scope '" + group + "' has managers but no token",
                        {{"group", group}});
    }
    config.scopes[group] = ScopeEntry{token->second, engine::AdminScope{group, managers}};
  }
  for (const auto& [group, _] : scope_tokens) {
    if (!scope_managers.contains(group)) {
      return make_error(ErrorCode::ParseError, "scope '" + group + "' has a token but no managers",
                        {{"group", group}});
    }
  }
  return config;
}

Result<ServiceConfig> load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return make_error(ErrorCode::StorageFailure, "cannot open config file",
                      {{"path", path.string()}});
  }
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config_text(text);
}

void apply_env_overrides(ServiceConfig& config) {
  if (const char* addr = std::getenv("DRBAC_ADDR"); addr != nullptr && *addr != '\0') {
    if (auto listen = parse_listen_address(addr)) {
      config.listen_host = listen.value().first;
      config.listen_port = listen.value().second;
    }
  }
  if (const char* log = std::getenv("DRBAC_LOG"); log != nullptr && *log != '\0') {
    config.log_path = log;
  }
}

}  // namespace drbac::api
