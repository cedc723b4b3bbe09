// drbac — local administration tool for the role-based access-control engine.
//
// Mutations run under a full admin scope (the tool operates on a log file the
// caller already owns); the service is the place where scoped tokens apply.

#include <csignal>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "drbac/api/config.h"
#include "drbac/api/server.h"
#include "drbac/cost/bench.h"
#include "drbac/dispatch/dispatcher.h"
#include "drbac/engine/engine.h"
#include "drbac/store/replay.h"
#include "drbac/util/sha256.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDeny = 1;
constexpr int kExitError = 2;

int fail(const drbac::Error& error) {
  std::cerr << "error: " << error.message << '\n';
  if (!error.details.empty()) {
    std::cerr << "  " << error.details.dump() << '\n';
  }
  return kExitError;
}

std::filesystem::path resolve_log_path(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("DRBAC_LOG"); env != nullptr && *env != '\0') return env;
  return "drbac.log";
}

drbac::Result<drbac::model::Metadata> parse_meta(const std::vector<std::string>& pairs) {
  drbac::model::Metadata metadata;
  for (const std::string& pair : pairs) {
    const auto equals = pair.find('=');
    if (equals == std::string::npos || equals == 0) {
      return drbac::make_error(drbac::ErrorCode::BadRequest,
                               "metadata entries must be key=value: " + pair);
    }
    metadata[pair.substr(0, equals)] = pair.substr(equals + 1);
  }
  return metadata;
}

drbac::Result<std::vector<std::uint64_t>> parse_role_counts(const std::string& text) {
  std::vector<std::uint64_t> counts;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      counts.push_back(std::stoull(item));
    } catch (const std::exception&) {
      return drbac::make_error(drbac::ErrorCode::BadRequest,
                               "role counts must be integers: " + item);
    }
  }
  return counts;
}

int print_decision(const drbac::model::Decision& decision, bool as_json) {
  if (as_json) {
    std::cout << nlohmann::json(decision).dump(2) << '\n';
  } else if (decision.allowed) {
    std::cout << "allow";
    if (!decision.matched_roles.empty()) {
      std::cout << " (matched:";
      for (const auto& role : decision.matched_roles) std::cout << ' ' << role;
      std::cout << ')';
    }
    std::cout << " cost=" << decision.cost.total << '\n';
  } else {
    std::cout << "deny (" << drbac::model::decision_reason_name(decision.reason)
              << ") cost=" << decision.cost.total << '\n';
  }
  return decision.allowed ? kExitOk : kExitDeny;
}

drbac::api::ApiServer* g_server = nullptr;

void handle_signal(int) {
  if (g_server != nullptr) {
    g_server->request_stop();
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace drbac;

  CLI::App app{"dynamic role-based access-control engine"};
  app.require_subcommand(1);

  std::string log_flag;
  app.add_option("--log-path", log_flag, "event log file (default: $DRBAC_LOG or ./drbac.log)");

  const engine::AdminScope cli_scope = engine::AdminScope::full("cli");

  // Deferred handlers: CLI11 parses first, then the selected action runs.
  std::function<int()> action;

  // ── role ──────────────────────────────────────────────────────────────────
  auto* role = app.add_subcommand("role", "manage roles");
  role->require_subcommand(1);
  {
    auto* add = role->add_subcommand("add", "add a role");
    auto id = std::make_shared<std::string>();
    auto desc = std::make_shared<std::string>();
    auto meta = std::make_shared<std::vector<std::string>>();
    add->add_option("id", *id, "role id")->required();
    add->add_option("--desc", *desc, "description");
    add->add_option("--meta", *meta, "metadata key=value (repeatable)");
    add->callback([&, id, desc, meta] {
      action = [&, id, desc, meta]() -> int {
        auto metadata = parse_meta(*meta);
        if (!metadata) return fail(metadata.error());
        auto parsed = model::EntityId::parse(model::EntityKind::Role, *id);
        if (!parsed) return fail(parsed.error());
        auto engine = engine::Engine::open(resolve_log_path(log_flag));
        if (!engine) return fail(engine.error());
        auto added = engine.value().add_role(
            cli_scope, model::Role{std::move(parsed).value(), *desc, metadata.value()});
        if (!added) return fail(added.error());
        std::cout << "added role " << added.value() << '\n';
        return kExitOk;
      };
    });

    auto* rm = role->add_subcommand("rm", "remove a role");
    auto rm_id = std::make_shared<std::string>();
    rm->add_option("id", *rm_id, "role id")->required();
    rm->callback([&, rm_id] {
      action = [&, rm_id]() -> int {
        auto engine = engine::Engine::open(resolve_log_path(log_flag));
        if (!engine) return fail(engine.error());
        auto removed = engine.value().remove_role(cli_scope, *rm_id);
        if (!removed) return fail(removed.error());
        std::cout << "removed role " << *rm_id << '\n';
        return kExitOk;
      };
    });

    auto* ls = role->add_subcommand("ls", "list roles");
    ls->callback([&] {
      action = [&]() -> int {
        auto engine = engine::Engine::open(resolve_log_path(log_flag));
        if (!engine) return fail(engine.error());
        for (const auto& entry : engine.value().list_roles()) {
          std::cout << entry.id.value();
          if (!entry.description.empty()) std::cout << "  # " << entry.description;
          std::cout << '\n';
        }
        return kExitOk;
      };
    });
  }

  // ── user ──────────────────────────────────────────────────────────────────
  auto* user = app.add_subcommand("user", "manage users");
  user->require_subcommand(1);
  {
    auto* add = user->add_subcommand("add", "add a user");
    auto id = std::make_shared<std::string>();
    auto ref = std::make_shared<std::string>();
    auto meta = std::make_shared<std::vector<std::string>>();
    add->add_option("id", *id, "user id")->required();
    add->add_option("--ref", *ref, "external identity reference");
    add->add_option("--meta", *meta, "metadata key=value (repeatable)");
    add->callback([&, id, ref, meta] {
      action = [&, id, ref, meta]() -> int {
        auto metadata = parse_meta(*meta);
        if (!metadata) return fail(metadata.error());
        auto parsed = model::EntityId::parse(model::EntityKind::User, *id);
        if (!parsed) return fail(parsed.error());
        auto engine = engine::Engine::open(resolve_log_path(log_flag));
        if (!engine) return fail(engine.error());
        model::User entity{std::move(parsed).value(),
                           ref->empty() ? std::nullopt : std::optional<std::string>(*ref),
                           metadata.value(), true};
        auto added = engine.value().add_user(cli_scope, entity);
        if (!added) return fail(added.error());
        std::cout << "added user " << added.value() << '\n';
        return kExitOk;
      };
    });

    auto* rm = user->add_subcommand("rm", "remove a user");
    auto rm_id = std::make_shared<std::string>();
    rm->add_option("id", *rm_id, "user id")->required();
    rm->callback([&, rm_id] {
      action = [&, rm_id]() -> int {
        auto engine = engine::Engine::open(resolve_log_path(log_flag));
        if (!engine) return fail(engine.error());
        auto removed = engine.value().remove_user(cli_scope, *rm_id);
        if (!removed) return fail(removed.error());
        std::cout << "removed user " << *rm_id << '\n';
        return kExitOk;
      };
    });

    auto* ls = user->add_subcommand("ls", "list users");
    ls->callback([&] {
      action = [&]() -> int {
        auto engine = engine::Engine::open(resolve_log_path(log_flag));
        if (!engine) return fail(engine.error());
        for (const auto& entry : engine.value().list_users()) {
          std::cout << entry.id.value() << (entry.active ? "" : "  [inactive]");
          if (entry.external_ref) std::cout << "  ref=" << *entry.external_ref;
          std::cout << '\n';
        }
        return kExitOk;
      };
    });

    for (const bool target_active : {true, false}) {
      auto* sub = user->add_subcommand(target_active ? "activate" : "deactivate",
                                       target_active ? "reactivate a user"
                                                     : "suspend a user (denied as inactive)");
      auto sub_id = std::make_shared<std::string>();
      sub->add_option("id", *sub_id, "user id")->required();
      sub->callback([&, sub_id, target_active] {
        action = [&, sub_id, target_active]() -> int {
          auto engine = engine::Engine::open(resolve_log_path(log_flag));
          if (!engine) return fail(engine.error());
          auto set = engine.value().set_user_active(cli_scope, *sub_id, target_active);
          if (!set) return fail(set.error());
          std::cout << *sub_id << (target_active ? " activated" : " deactivated") << '\n';
          return kExitOk;
        };
      });
    }
  }

  // ── fn ────────────────────────────────────────────────────────────────────
  auto* fn = app.add_subcommand("fn", "manage functions");
  fn->require_subcommand(1);
  {
    auto* add = fn->add_subcommand("add", "register a function");
    auto id = std::make_shared<std::string>();
    auto contract = std::make_shared<std::string>();
    auto name = std::make_shared<std::string>();
    add->add_option("id", *id, "function id")->required();
    add->add_option("contract", *contract, "target contract name")->required();
    add->add_option("name", *name, "function name on the contract")->required();
    add->callback([&, id, contract, name] {
      action = [&, id, contract, name]() -> int {
        auto parsed = model::EntityId::parse(model::EntityKind::Function, *id);
        if (!parsed) return fail(parsed.error());
        auto engine = engine::Engine::open(resolve_log_path(log_flag));
        if (!engine) return fail(engine.error());
        auto added = engine.value().register_function(
            cli_scope, model::FunctionDef{std::move(parsed).value(), *contract, *name,
                                          std::nullopt});
        if (!added) return fail(added.error());
        std::cout << "registered function " << added.value() << '\n';
        return kExitOk;
      };
    });

    auto* rm = fn->add_subcommand("rm", "remove a function");
    auto rm_id = std::make_shared<std::string>();
    rm->add_option("id", *rm_id, "function id")->required();
    rm->callback([&, rm_id] {
      action = [&, rm_id]() -> int {
        auto engine = engine::Engine::open(resolve_log_path(log_flag));
        if (!engine) return fail(engine.error());
        auto removed = engine.value().remove_function(cli_scope, *rm_id);
        if (!removed) return fail(removed.error());
        std::cout << "removed function " << *rm_id << '\n';
        return kExitOk;
      };
    });

    auto* ls = fn->add_subcommand("ls", "list functions");
    ls->callback([&] {
      action = [&]() -> int {
        auto engine = engine::Engine::open(resolve_log_path(log_flag));
        if (!engine) return fail(engine.error());
        for (const auto& entry : engine.value().list_functions()) {
          std::cout << entry.id.value() << "  " << entry.target_contract << "."
                    << entry.function_name << '\n';
        }
        return kExitOk;
      };
    });
  }

  // ── grant / revoke / bind / unbind / mode ────────────────────────────────
  {
    auto* grant = app.add_subcommand("grant", "assign a role to a user");
    auto u = std::make_shared<std::string>();
    auto r = std::make_shared<std::string>();
    grant->add_option("user", *u, "user id")->required();
    grant->add_option("role", *r, "role id")->required();
    grant->callback([&, u, r] {
      action = [&, u, r]() -> int {
        auto engine = engine::Engine::open(resolve_log_path(log_flag));
        if (!engine) return fail(engine.error());
        auto granted = engine.value().assign_role(cli_scope, *u, *r);
        if (!granted) return fail(granted.error());
        std::cout << "granted " << *r << " to " << *u << '\n';
        return kExitOk;
      };
    });

    auto* revoke = app.add_subcommand("revoke", "revoke a role from a user");
    auto ru = std::make_shared<std::string>();
    auto rr = std::make_shared<std::string>();
    revoke->add_option("user", *ru, "user id")->required();
    revoke->add_option("role", *rr, "role id")->required();
    revoke->callback([&, ru, rr] {
      action = [&, ru, rr]() -> int {
        auto engine = engine::Engine::open(resolve_log_path(log_flag));
        if (!engine) return fail(engine.error());
        auto revoked = engine.value().revoke_role(cli_scope, *ru, *rr);
        if (!revoked) return fail(revoked.error());
        std::cout << "revoked " << *rr << " from " << *ru << '\n';
        return kExitOk;
      };
    });

    auto* bind = app.add_subcommand("bind", "allow a role to call a function");
    auto bf = std::make_shared<std::string>();
    auto br = std::make_shared<std::string>();
    bind->add_option("fn", *bf, "function id")->required();
    bind->add_option("role", *br, "role id")->required();
    bind->callback([&, bf, br] {
      action = [&, bf, br]() -> int {
        auto engine = engine::Engine::open(resolve_log_path(log_flag));
        if (!engine) return fail(engine.error());
        auto bound = engine.value().bind_policy(cli_scope, *bf, *br);
        if (!bound) return fail(bound.error());
        std::cout << "bound " << *br << " to " << *bf << '\n';
        return kExitOk;
      };
    });

    auto* unbind = app.add_subcommand("unbind", "remove a role from a function's policy");
    auto uf = std::make_shared<std::string>();
    auto ur = std::make_shared<std::string>();
    unbind->add_option("fn", *uf, "function id")->required();
    unbind->add_option("role", *ur, "role id")->required();
    unbind->callback([&, uf, ur] {
      action = [&, uf, ur]() -> int {
        auto engine = engine::Engine::open(resolve_log_path(log_flag));
        if (!engine) return fail(engine.error());
        auto unbound = engine.value().unbind_policy(cli_scope, *uf, *ur);
        if (!unbound) return fail(unbound.error());
        std::cout << "unbound " << *ur << " from " << *uf << '\n';
        return kExitOk;
      };
    });

    auto* mode = app.add_subcommand("mode", "set a policy's evaluation mode");
    auto mf = std::make_shared<std::string>();
    auto mv = std::make_shared<std::string>();
    mode->add_option("fn", *mf, "function id")->required();
    mode->add_option("mode", *mv, "anyof or mofp:<m>")->required();
    mode->callback([&, mf, mv] {
      action = [&, mf, mv]() -> int {
        auto parsed = policy::PolicyMode::parse(*mv);
        if (!parsed) return fail(parsed.error());
        auto engine = engine::Engine::open(resolve_log_path(log_flag));
        if (!engine) return fail(engine.error());
        auto set = engine.value().set_policy_mode(cli_scope, *mf, parsed.value());
        if (!set) return fail(set.error());
        std::cout << *mf << " mode set to " << parsed.value().to_string() << '\n';
        return kExitOk;
      };
    });
  }

  // ── check / whatif ────────────────────────────────────────────────────────
  {
    auto* check = app.add_subcommand("check", "evaluate an authorization decision");
    auto cu = std::make_shared<std::string>();
    auto cf = std::make_shared<std::string>();
    auto cj = std::make_shared<bool>(false);
    check->add_option("user", *cu, "user id")->required();
    check->add_option("fn", *cf, "function id")->required();
    check->add_flag("--json", *cj, "print the full decision as JSON");
    check->callback([&, cu, cf, cj] {
      action = [&, cu, cf, cj]() -> int {
        auto engine = engine::Engine::open(resolve_log_path(log_flag));
        if (!engine) return fail(engine.error());
        return print_decision(engine.value().check_authorization(*cu, *cf), *cj);
      };
    });

    auto* whatif = app.add_subcommand("whatif", "hypothetical check with extra roles");
    auto wu = std::make_shared<std::string>();
    auto wf = std::make_shared<std::string>();
    auto wr = std::make_shared<std::vector<std::string>>();
    auto wj = std::make_shared<bool>(false);
    whatif->add_option("user", *wu, "user id")->required();
    whatif->add_option("fn", *wf, "function id")->required();
    whatif->add_option("--with-role", *wr, "role to assume the user also holds (repeatable)")
        ->required();
    whatif->add_flag("--json", *wj, "print the full decision as JSON");
    whatif->callback([&, wu, wf, wr, wj] {
      action = [&, wu, wf, wr, wj]() -> int {
        auto engine = engine::Engine::open(resolve_log_path(log_flag));
        if (!engine) return fail(engine.error());
        const model::RoleIdSet extra(wr->begin(), wr->end());
        return print_decision(engine.value().check_authorization_with(*wu, *wf, extra), *wj);
      };
    });
  }

  // ── import ────────────────────────────────────────────────────────────────
  {
    auto* import = app.add_subcommand("import", "bulk-import users from a JSON file");
    auto file = std::make_shared<std::string>();
    import->add_option("file", *file, "bulk import file")->required();
    import->callback([&, file] {
      action = [&, file]() -> int {
        std::ifstream in(*file, std::ios::binary);
        if (!in) {
          return fail(make_error(ErrorCode::StorageFailure, "cannot open import file",
                                 {{"path", *file}}));
        }
        const std::string text((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
        auto parsed = engine::parse_bulk_import(text);
        if (!parsed) return fail(parsed.error());
        auto engine = engine::Engine::open(resolve_log_path(log_flag));
        if (!engine) return fail(engine.error());
        auto summary = engine.value().import_users(cli_scope, parsed.value());
        if (!summary) return fail(summary.error());
        std::cout << "imported " << summary.value().users_created << " users, "
                  << summary.value().roles_granted << " role grants\n";
        return kExitOk;
      };
    });
  }

  // ── audit ─────────────────────────────────────────────────────────────────
  {
    auto* audit = app.add_subcommand("audit", "audit the event log");
    audit->require_subcommand(1);
    auto* verify = audit->add_subcommand("verify", "recompute the full hash chain");
    verify->callback([&] {
      action = [&]() -> int {
        const auto path = resolve_log_path(log_flag);
        auto verified = store::verify_log_file(path);
        if (!verified) return fail(verified.error());
        const auto& events = verified.value().events;
        std::cout << "ok: " << events.size() << " events, last hash "
                  << util::to_hex(events.empty() ? util::kZeroDigest
                                                 : events.back().this_hash)
                  << '\n';
        return kExitOk;
      };
    });
  }

  // ── bench ─────────────────────────────────────────────────────────────────
  {
    auto* bench = app.add_subcommand("bench", "cost-scaling benchmark");
    auto roles = std::make_shared<std::string>("1,2,4,8,16,32,64,128,256");
    auto trials = std::make_shared<std::uint64_t>(5);
    auto seed = std::make_shared<std::uint64_t>(42);
    auto as_json = std::make_shared<bool>(false);
    bench->add_option("--roles", *roles, "comma-separated role counts");
    bench->add_option("--trials", *trials, "trials per role count (>= 3)");
    bench->add_option("--seed", *seed, "rng seed");
    bench->add_flag("--json", *as_json, "emit the report as JSON");
    bench->callback([&, roles, trials, seed, as_json] {
      action = [&, roles, trials, seed, as_json]() -> int {
        auto counts = parse_role_counts(*roles);
        if (!counts) return fail(counts.error());
        auto report = cost::bench_scaling(counts.value(), *trials, *seed, cost::CostSchedule{});
        if (!report) return fail(report.error());
        if (*as_json) {
          std::cout << cost::report_to_json(report.value()).dump(2) << '\n';
        } else {
          std::cout << cost::report_to_table(report.value());
        }
        return kExitOk;
      };
    });
  }

  // ── replay ────────────────────────────────────────────────────────────────
  {
    auto* replay = app.add_subcommand("replay", "rebuild state from the log");
    auto logic = std::make_shared<std::string>("v1");
    replay->add_option("--logic", *logic, "logic version (v1 or v2)");
    replay->callback([&, logic] {
      action = [&, logic]() -> int {
        auto verified = store::verify_log_file(resolve_log_path(log_flag));
        if (!verified) return fail(verified.error());
        auto state = store::replay(verified.value().events, *logic);
        if (!state) return fail(state.error());
        const auto& s = state.value();
        std::cout << "replayed " << verified.value().events.size() << " events under " << *logic
                  << ": version=" << s.version << " users=" << s.users.size()
                  << " roles=" << s.roles.size() << " functions=" << s.functions.size() << '\n';
        std::cout << "state digest " << util::sha256_hex(engine::canonical_state(s)) << '\n';
        return kExitOk;
      };
    });
  }

  // ── snapshot ──────────────────────────────────────────────────────────────
  {
    auto* snapshot = app.add_subcommand("snapshot", "write or restore state snapshots");
    snapshot->require_subcommand(1);

    auto* write = snapshot->add_subcommand("write", "snapshot current state to a file");
    auto wfile = std::make_shared<std::string>();
    write->add_option("file", *wfile, "output file")->required();
    write->callback([&, wfile] {
      action = [&, wfile]() -> int {
        auto engine = engine::Engine::open(resolve_log_path(log_flag));
        if (!engine) return fail(engine.error());
        const auto snap = engine.value().make_snapshot();
        if (auto written = store::write_snapshot_file(snap, *wfile); !written) {
          return fail(written.error());
        }
        std::cout << "snapshot written: sequence " << snap.up_to_sequence << ", anchor "
                  << util::to_hex(snap.anchor_hash) << '\n';
        return kExitOk;
      };
    });

    auto* restore = snapshot->add_subcommand("restore", "validate and summarize a snapshot");
    auto rfile = std::make_shared<std::string>();
    restore->add_option("file", *rfile, "snapshot file")->required();
    restore->callback([&, rfile] {
      action = [&, rfile]() -> int {
        auto snap = store::read_snapshot_file(*rfile);
        if (!snap) return fail(snap.error());
        const auto& s = snap.value().state;
        std::cout << "snapshot ok: sequence " << snap.value().up_to_sequence
                  << " version=" << s.version << " users=" << s.users.size()
                  << " roles=" << s.roles.size() << " functions=" << s.functions.size() << '\n';
        return kExitOk;
      };
    });
  }

  // ── serve ─────────────────────────────────────────────────────────────────
  {
    auto* serve = app.add_subcommand("serve", "run the HTTP service");
    auto config_file = std::make_shared<std::string>();
    auto listen = std::make_shared<std::string>();
    serve->add_option("--config", *config_file, "key=value config file");
    serve->add_option("--listen", *listen, "host:port (overrides config)");
    serve->callback([&, config_file, listen] {
      action = [&, config_file, listen]() -> int {
        api::ServiceConfig config;
        if (!config_file->empty()) {
          auto loaded = api::load_config_file(*config_file);
          if (!loaded) return fail(loaded.error());
          config = std::move(loaded).value();
        }
        api::apply_env_overrides(config);
        if (!listen->empty()) {
          auto parsed = api::parse_listen_address(*listen);
          if (!parsed) return fail(parsed.error());
          config.listen_host = parsed.value().first;
          config.listen_port = parsed.value().second;
        }
        if (!log_flag.empty()) {
          config.log_path = log_flag;
        }
        if (config.log_path.empty()) {
          config.log_path = resolve_log_path(log_flag);
        }

        auto engine = engine::Engine::open(config.log_path);
        if (!engine) return fail(engine.error());
        engine.value().set_cost_schedule(config.schedule);

        dispatch::Dispatcher dispatcher(engine.value());
        dispatcher.set_default_handler(dispatch::handlers::echo());

        api::ApiServer server(engine.value(), dispatcher, config);
        if (auto started = server.start(); !started) return fail(started.error());
        std::cout << "listening on " << config.listen_host << ":" << server.port() << ", log "
                  << config.log_path.string() << '\n';
        if (config.scopes.empty()) {
          std::cout << "note: no admin scopes configured; every mutation request will be"
                       " rejected as unauthenticated\n";
        }

        g_server = &server;
        std::signal(SIGINT, handle_signal);
        std::signal(SIGTERM, handle_signal);
        server.wait();
        g_server = nullptr;
        return kExitOk;
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  if (!action) {
    std::cerr << "error: no action selected\n";
    return kExitError;
  }
  return action();
}
