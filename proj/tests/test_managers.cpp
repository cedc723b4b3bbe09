#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "drbac/engine/engine.h"
#include "support/oracle.h"

using namespace drbac;
using engine::Engine;
using engine::AdminScope;
using engine::ManagerKind;

namespace {

const AdminScope kScope = AdminScope::full("tests");

model::EntityId uid(const std::string& v) {
  return model::EntityId::parse(model::EntityKind::User, v).value();
}
model::EntityId rid(const std::string& v) {
  return model::EntityId::parse(model::EntityKind::Role, v).value();
}
model::EntityId fid(const std::string& v) {
  return model::EntityId::parse(model::EntityKind::Function, v).value();
}

Engine fresh_engine() { return Engine::in_memory().value(); }

// Engine pre-loaded with the canonical worked example: alice holds auditor,
// release requires auditor.
Engine example_engine() {
  Engine e = fresh_engine();
  REQUIRE(e.add_role(kScope, {rid("auditor"), "audit team", {}}).ok());
  REQUIRE(e.add_role(kScope, {rid("operator"), "", {}}).ok());
  REQUIRE(e.add_user(kScope, {uid("alice"), std::nullopt, {}, true}).ok());
  REQUIRE(e.add_user(kScope, {uid("bob"), std::nullopt, {}, true}).ok());
  REQUIRE(e.register_function(kScope, {fid("release"), "Deployment", "release", std::nullopt})
              .ok());
  REQUIRE(e.assign_role(kScope, "alice", "auditor").ok());
  REQUIRE(e.assign_role(kScope, "bob", "operator").ok());
  REQUIRE(e.bind_policy(kScope, "release", "auditor").ok());
  return e;
}

}  // namespace

TEST_CASE("role lifecycle: add, get, update, remove") {
  Engine e = fresh_engine();
  auto added = e.add_role(kScope, {rid("auditor"), "audit team", {{"tier", "2"}}});
  REQUIRE(added.ok());
  CHECK(added.value() == "auditor");
  CHECK(e.role_exists("auditor"));

  auto fetched = e.get_role("auditor");
  REQUIRE(fetched.ok());
  CHECK(fetched.value().description == "audit team");

  REQUIRE(e.update_role(kScope, "auditor", "updated", {}).ok());
  CHECK(e.get_role("auditor").value().description == "updated");
  CHECK(e.get_role("auditor").value().metadata.empty());

  REQUIRE(e.remove_role(kScope, "auditor").ok());
  CHECK_FALSE(e.role_exists("auditor"));
  CHECK(e.get_role("auditor").error().code == ErrorCode::RoleNotFound);
}

TEST_CASE("duplicate roles are rejected") {
  Engine e = fresh_engine();
  REQUIRE(e.add_role(kScope, {rid("auditor"), "", {}}).ok());
  auto again = e.add_role(kScope, {rid("auditor"), "different text", {}});
  REQUIRE_FALSE(again.ok());
  CHECK(again.error().code == ErrorCode::DuplicateRole);
  CHECK(again.error().details.at("id") == "auditor");
}

TEST_CASE("a referenced role cannot be removed and the error lists referents") {
  Engine e = example_engine();
  auto removed = e.remove_role(kScope, "auditor");
  REQUIRE_FALSE(removed.ok());
  CHECK(removed.error().code == ErrorCode::RoleInUse);
  CHECK(removed.error().details.at("users") == nlohmann::json::array({"alice"}));
  CHECK(removed.error().details.at("functions") == nlohmann::json::array({"release"}));

  // After detaching every referent the removal goes through.
  REQUIRE(e.revoke_role(kScope, "alice", "auditor").ok());
  REQUIRE(e.unbind_policy(kScope, "release", "auditor").ok());
  CHECK(e.remove_role(kScope, "auditor").ok());
}

TEST_CASE("function registration rejects duplicate ids and duplicate signatures") {
  Engine e = fresh_engine();
  REQUIRE(e.register_function(kScope, {fid("release"), "Deployment", "release", std::nullopt})
              .ok());

  auto same_id = e.register_function(kScope, {fid("release"), "Other", "other", std::nullopt});
  REQUIRE_FALSE(same_id.ok());
  CHECK(same_id.error().code == ErrorCode::DuplicateFunction);

  auto same_signature =
      e.register_function(kScope, {fid("release2"), "Deployment", "release", std::nullopt});
  REQUIRE_FALSE(same_signature.ok());
  CHECK(same_signature.error().code == ErrorCode::DuplicateFunction);
  CHECK(same_signature.error().details.at("existing_id") == "release");

  // Same name on a different contract is a different function.
  CHECK(e.register_function(kScope, {fid("release3"), "Staging", "release", std::nullopt}).ok());
}

TEST_CASE("a function with a policy cannot be removed") {
  Engine e = example_engine();
  auto removed = e.remove_function(kScope, "release");
  REQUIRE_FALSE(removed.ok());
  CHECK(removed.error().code == ErrorCode::FunctionInUse);

  REQUIRE(e.unbind_policy(kScope, "release", "auditor").ok());
  CHECK(e.remove_function(kScope, "release").ok());
  CHECK_FALSE(e.function_exists("release"));
}

TEST_CASE("user lifecycle with external refs") {
  Engine e = fresh_engine();
  REQUIRE(e.add_user(kScope, {uid("alice"), std::string("idm:1"), {}, true}).ok());

  auto dup_id = e.add_user(kScope, {uid("alice"), std::nullopt, {}, true});
  CHECK(dup_id.error().code == ErrorCode::DuplicateUser);

  auto dup_ref = e.add_user(kScope, {uid("alice2"), std::string("idm:1"), {}, true});
  REQUIRE_FALSE(dup_ref.ok());
  CHECK(dup_ref.error().code == ErrorCode::DuplicateExternalRef);
  CHECK(dup_ref.error().details.at("existing_id") == "alice");

  REQUIRE(e.remove_user(kScope, "alice").ok());
  // The ref is free again once its holder is gone.
  CHECK(e.add_user(kScope, {uid("alice2"), std::string("idm:1"), {}, true}).ok());
}

TEST_CASE("a user holding roles cannot be removed") {
  Engine e = example_engine();
  auto removed = e.remove_user(kScope, "alice");
  REQUIRE_FALSE(removed.ok());
  CHECK(removed.error().code == ErrorCode::UserHasRoles);
  CHECK(removed.error().details.at("roles") == nlohmann::json::array({"auditor"}));

  REQUIRE(e.revoke_role(kScope, "alice", "auditor").ok());
  CHECK(e.remove_user(kScope, "alice").ok());
}

TEST_CASE("assignment validation—both endpoints must exist, no duplicates") {
  Engine e = example_engine();
  CHECK(e.assign_role(kScope, "ghost", "auditor").error().code == ErrorCode::UserNotFound);
  CHECK(e.assign_role(kScope, "alice", "ghost").error().code == ErrorCode::RoleNotFound);
  CHECK(e.assign_role(kScope, "alice", "auditor").error().code ==
        ErrorCode::DuplicateAssignment);
  CHECK(e.revoke_role(kScope, "alice", "operator").error().code ==
        ErrorCode::AssignmentNotFound);
  CHECK(e.revoke_role(kScope, "ghost", "auditor").error().code == ErrorCode::UserNotFound);
}

TEST_CASE("revoking the last role drops the adjacency entry entirely") {
  Engine e = example_engine();
  REQUIRE(e.revoke_role(kScope, "alice", "auditor").ok());
  const auto state = e.state_copy();
  CHECK_FALSE(state.user_roles.contains("alice"));
  CHECK(e.get_user_roles("alice").value().empty());
}

TEST_CASE("policy binding validation") {
  Engine e = example_engine();
  CHECK(e.bind_policy(kScope, "ghost", "auditor").error().code == ErrorCode::FunctionNotFound);
  CHECK(e.bind_policy(kScope, "release", "ghost").error().code == ErrorCode::RoleNotFound);
  CHECK(e.bind_policy(kScope, "release", "auditor").error().code ==
        ErrorCode::DuplicateBinding);
  CHECK(e.unbind_policy(kScope, "release", "operator").error().code ==
        ErrorCode::BindingNotFound);
}

TEST_CASE("unbinding the last role removes the policy entry") {
  Engine e = example_engine();
  REQUIRE(e.unbind_policy(kScope, "release", "auditor").ok());
  CHECK_FALSE(e.state_copy().policies.contains("release"));
  // And the function reads as the implicit empty any-of policy.
  auto roles = e.get_function_roles("release");
  REQUIRE(roles.ok());
  CHECK(roles.value().first.empty());
  CHECK(roles.value().second.is_any_of());
}

TEST_CASE("threshold bounds are enforced on set and on unbind") {
  Engine e = example_engine();
  REQUIRE(e.bind_policy(kScope, "release", "operator").ok());

  // m must satisfy 1 <= m <= bound roles.
  CHECK(e.set_policy_mode(kScope, "release", policy::PolicyMode::m_of_p(3).value())
            .error()
            .code == ErrorCode::ThresholdViolation);
  REQUIRE(e.set_policy_mode(kScope, "release", policy::PolicyMode::m_of_p(2).value()).ok());

  // Unbinding below the threshold is refused until the mode is relaxed.
  auto unbind = e.unbind_policy(kScope, "release", "operator");
  REQUIRE_FALSE(unbind.ok());
  CHECK(unbind.error().code == ErrorCode::ThresholdViolation);
  CHECK(unbind.error().details.at("remaining") == 1);

  REQUIRE(e.set_policy_mode(kScope, "release", policy::PolicyMode::any_of()).ok());
  CHECK(e.unbind_policy(kScope, "release", "operator").ok());
}

TEST_CASE("setting any-of on a function without a policy entry is a no-op mutation") {
  Engine e = fresh_engine();
  REQUIRE(e.register_function(kScope, {fid("f"), "T", "f", std::nullopt}).ok());
  const auto version_before = e.version();
  REQUIRE(e.set_policy_mode(kScope, "f", policy::PolicyMode::any_of()).ok());
  // Accepted, logged, version bumped — but no policy entry appears.
  CHECK(e.version() == version_before + 1);
  CHECK_FALSE(e.state_copy().policies.contains("f"));
  // An m-of-p mode on the same function is rejected (bound is zero).
  CHECK(e.set_policy_mode(kScope, "f", policy::PolicyMode::m_of_p(1).value()).error().code ==
        ErrorCode::ThresholdViolation);
}

TEST_CASE("every accepted mutation bumps the version by exactly one") {
  Engine e = fresh_engine();
  CHECK(e.version() == 0);
  REQUIRE(e.add_role(kScope, {rid("r"), "", {}}).ok());
  CHECK(e.version() == 1);
  // A no-op update (same description, same metadata) still logs and bumps.
  REQUIRE(e.update_role(kScope, "r", "", {}).ok());
  CHECK(e.version() == 2);
  CHECK(e.applied_events() == 2);
}

TEST_CASE("rejected mutations leave no trace in state or log") {
  Engine e = example_engine();
  const std::string before = engine::canonical_state(e.state_copy());
  const auto events_before = e.applied_events();
  const auto hash_before = e.last_hash();

  CHECK_FALSE(e.add_role(kScope, {rid("auditor"), "", {}}).ok());
  CHECK_FALSE(e.remove_role(kScope, "auditor").ok());
  CHECK_FALSE(e.assign_role(kScope, "alice", "auditor").ok());
  CHECK_FALSE(e.remove_user(kScope, "alice").ok());
  CHECK_FALSE(e.set_policy_mode(kScope, "release", policy::PolicyMode::m_of_p(9).value()).ok());

  CHECK(engine::canonical_state(e.state_copy()) == before);
  CHECK(e.applied_events() == events_before);
  CHECK(e.last_hash() == hash_before);
}

TEST_CASE("admin scopes restrict mutations to the permitted manager") {
  Engine e = fresh_engine();
  const AdminScope role_only{"role-admins", {ManagerKind::RoleMgr}};

  CHECK(e.add_role(role_only, {rid("r"), "", {}}).ok());

  auto denied = e.add_user(role_only, {uid("u"), std::nullopt, {}, true});
  REQUIRE_FALSE(denied.ok());
  CHECK(denied.error().code == ErrorCode::ScopeViolation);
  CHECK(denied.error().details.at("group") == "role-admins");
  CHECK(denied.error().details.at("manager") == "user");

  // The refusal happens before validation: nothing is logged.
  CHECK(e.applied_events() == 1);
  CHECK_FALSE(e.user_exists("u"));
}

TEST_CASE("each mutation kind maps to its manager for scoping") {
  Engine e = example_engine();
  const AdminScope none{"watchers", {}};
  CHECK(e.update_role(none, "auditor", "x", {}).error().code == ErrorCode::ScopeViolation);
  CHECK(e.remove_function(none, "release").error().code == ErrorCode::ScopeViolation);
  CHECK(e.set_user_active(none, "alice", false).error().code == ErrorCode::ScopeViolation);
  CHECK(e.assign_role(none, "bob", "auditor").error().code == ErrorCode::ScopeViolation);
  CHECK(e.bind_policy(none, "release", "operator").error().code == ErrorCode::ScopeViolation);
  CHECK(e.import_users(none, {}).error().code == ErrorCode::ScopeViolation);

  // Assignments belong to the user manager, bindings to the policy manager.
  const AdminScope user_only{"u", {ManagerKind::UserMgr}};
  CHECK(e.assign_role(user_only, "bob", "auditor").ok());
  CHECK(e.bind_policy(user_only, "release", "operator").error().code ==
        ErrorCode::ScopeViolation);
}

TEST_CASE("worked example: intersection grants and denies as documented") {
  Engine e = example_engine();

  auto allow = e.check_authorization("alice", "release");
  CHECK(allow.allowed);
  CHECK(allow.reason == model::DecisionReason::Matched);
  CHECK(allow.matched_roles == model::RoleIdSet{"auditor"});

  auto deny = e.check_authorization("bob", "release");
  CHECK_FALSE(deny.allowed);
  CHECK(deny.reason == model::DecisionReason::NoRoleIntersection);
  CHECK(deny.matched_roles.empty());
}

TEST_CASE("unknown principals and inactive users deny with early-exit costs") {
  Engine e = example_engine();

  auto unknown_user = e.check_authorization("ghost", "release");
  CHECK(unknown_user.reason == model::DecisionReason::UnknownUser);
  CHECK(unknown_user.cost.reads == 1);  // stopped at the user probe

  auto unknown_fn = e.check_authorization("alice", "ghost");
  CHECK(unknown_fn.reason == model::DecisionReason::UnknownFunction);
  CHECK(unknown_fn.cost.reads == 2);  // user probe + function probe

  REQUIRE(e.set_user_active(kScope, "alice", false).ok());
  auto inactive = e.check_authorization("alice", "release");
  CHECK(inactive.reason == model::DecisionReason::InactiveUser);
  CHECK(inactive.cost.reads == 2);  // denied before any role fetch

  REQUIRE(e.set_user_active(kScope, "alice", true).ok());
  CHECK(e.check_authorization("alice", "release").allowed);
}

TEST_CASE("the full path charges two probes, both role fetches, and the policy read") {
  Engine e = example_engine();
  const cost::CostSchedule schedule;  // read=100, compare=3

  // alice: 1 role; release: 1 required role → reads = 2+1+1+1, compares = 1.
  auto allow = e.check_authorization("alice", "release");
  CHECK(allow.cost.reads == 5);
  CHECK(allow.cost.compares == 1);
  CHECK(allow.cost.total == 5 * schedule.read_cost + 1 * schedule.compare_cost);
  CHECK(allow.cost.total == 503);

  // bob: 1 role, no overlap → same read/compare shape as the allow.
  CHECK(e.check_authorization("bob", "release").cost.total == 503);

  // A user with no roles reads one fewer entry: 2+0+1+1 reads.
  REQUIRE(e.add_user(kScope, {uid("carol"), std::nullopt, {}, true}).ok());
  auto no_roles = e.check_authorization("carol", "release");
  CHECK(no_roles.cost.reads == 4);
  CHECK(no_roles.cost.total == 403);
}

TEST_CASE("checks never mutate anything") {
  Engine e = example_engine();
  const std::string before = engine::canonical_state(e.state_copy());
  const auto events = e.applied_events();
  for (int i = 0; i < 10; ++i) {
    (void)e.check_authorization("alice", "release");
    (void)e.check_authorization("ghost", "ghost");
    (void)e.check_authorization_with("bob", "release", {"auditor"});
  }
  CHECK(engine::canonical_state(e.state_copy()) == before);
  CHECK(e.applied_events() == events);
}

TEST_CASE("deny by default: a fresh function denies every user") {
  Engine e = example_engine();
  REQUIRE(e.register_function(kScope, {fid("unbound"), "T", "unbound", std::nullopt}).ok());
  for (const char* user : {"alice", "bob"}) {
    auto decision = e.check_authorization(user, "unbound");
    CHECK_FALSE(decision.allowed);
    CHECK(decision.reason == model::DecisionReason::NoRoleIntersection);
  }
}

TEST_CASE("revocation takes effect on the very next check") {
  Engine e = example_engine();
  CHECK(e.check_authorization("alice", "release").allowed);
  REQUIRE(e.revoke_role(kScope, "alice", "auditor").ok());
  CHECK_FALSE(e.check_authorization("alice", "release").allowed);
  REQUIRE(e.assign_role(kScope, "alice", "auditor").ok());
  CHECK(e.check_authorization("alice", "release").allowed);
}

TEST_CASE("hypothetical checks evaluate extra roles without granting them") {
  Engine e = example_engine();
  CHECK_FALSE(e.check_authorization("bob", "release").allowed);

  auto whatif = e.check_authorization_with("bob", "release", {"auditor"});
  CHECK(whatif.allowed);
  CHECK(whatif.matched_roles == model::RoleIdSet{"auditor"});

  // The real answer is unchanged, and nothing was logged.
  CHECK_FALSE(e.check_authorization("bob", "release").allowed);

  // Extra roles merge with held roles (sets, so overlaps collapse).
  auto merged = e.check_authorization_with("alice", "release", {"operator", "auditor"});
  CHECK(merged.allowed);
  CHECK(merged.cost.reads == 2 + 2 + 1 + 1);  // merged r_i has two distinct roles
}

TEST_CASE("trace records the delegation order across managers") {
  Engine e = example_engine();
  engine::TraceRecorder recorder;
  (void)e.check_authorization("alice", "release", &recorder);
  const std::vector<std::string> expected{
      "permissions_manager.check_authorization",
      "user_manager.get_user_roles",
      "policy_manager.get_function_roles",
      "policy_engine.evaluate",
      "decision:allow",
  };
  CHECK(recorder.steps() == expected);

  recorder.clear();
  (void)e.check_authorization("ghost", "release", &recorder);
  // Early exits skip the role-fetch steps entirely.
  const std::vector<std::string> early{
      "permissions_manager.check_authorization",
      "policy_engine.evaluate",
      "decision:deny",
  };
  CHECK(recorder.steps() == early);
}

TEST_CASE("list endpoints return entries sorted by id") {
  Engine e = fresh_engine();
  for (const char* r : {"zeta", "alpha", "mid"}) {
    REQUIRE(e.add_role(kScope, {rid(r), "", {}}).ok());
  }
  const auto roles = e.list_roles();
  REQUIRE(roles.size() == 3);
  CHECK(roles[0].id.value() == "alpha");
  CHECK(roles[1].id.value() == "mid");
  CHECK(roles[2].id.value() == "zeta");
}

TEST_CASE("bulk import creates users and grants atomically") {
  Engine e = fresh_engine();
  REQUIRE(e.add_role(kScope, {rid("auditor"), "", {}}).ok());

  const std::string text = R"({
    "format_version": 1,
    "users": [
      {"external_ref": "idm:1", "id": "alice", "roles": ["auditor"]},
      {"external_ref": "idm:2", "roles": []}
    ]
  })";
  auto import = engine::parse_bulk_import(text);
  REQUIRE(import.ok());
  auto summary = e.import_users(kScope, import.value());
  REQUIRE(summary.ok());
  CHECK(summary.value().users_created == 2);
  CHECK(summary.value().roles_granted == 1);
  CHECK(e.user_exists("alice"));
  CHECK(e.user_exists("idm:2"));  // id defaults to the external ref
  CHECK(e.get_user_roles("alice").value() == model::RoleIdSet{"auditor"});
  CHECK(e.applied_events() == 2);  // role.add + one import event
}

TEST_CASE("bulk import rejects unknown roles without partial application") {
  Engine e = fresh_engine();
  REQUIRE(e.add_role(kScope, {rid("auditor"), "", {}}).ok());
  const std::string before = engine::canonical_state(e.state_copy());
  const auto events = e.applied_events();

  const std::string text = R"({
    "format_version": 1,
    "users": [
      {"external_ref": "idm:1", "id": "alice", "roles": ["auditor"]},
      {"external_ref": "idm:2", "id": "bob", "roles": ["missing"]}
    ]
  })";
  auto summary = e.import_users(kScope, engine::parse_bulk_import(text).value());
  REQUIRE_FALSE(summary.ok());
  CHECK(summary.error().code == ErrorCode::UnknownRoleInImport);
  CHECK(summary.error().details.at("line") == 2);
  CHECK(summary.error().details.at("role") == "missing");

  // Entry 1 was valid but must not have been applied.
  CHECK_FALSE(e.user_exists("alice"));
  CHECK(engine::canonical_state(e.state_copy()) == before);
  CHECK(e.applied_events() == events);
}

TEST_CASE("bulk import rejects collisions with existing users") {
  Engine e = example_engine();
  const std::string text = R"({
    "format_version": 1,
    "users": [{"external_ref": "idm:9", "id": "alice", "roles": []}]
  })";
  auto summary = e.import_users(kScope, engine::parse_bulk_import(text).value());
  REQUIRE_FALSE(summary.ok());
  CHECK(summary.error().code == ErrorCode::DuplicateUserInImport);
}

TEST_CASE("bulk import parser rejects malformed documents") {
  CHECK_FALSE(engine::parse_bulk_import("not json").ok());
  CHECK_FALSE(engine::parse_bulk_import(R"({"format_version": 2, "users": []})").ok());
  CHECK_FALSE(engine::parse_bulk_import(R"({"format_version": 1})").ok());
  CHECK_FALSE(
      engine::parse_bulk_import(R"({"format_version": 1, "users": [{"roles": []}]})").ok());
}

TEST_CASE("direct operation application rejects unknown names and bad payloads") {
  engine::EngineState state;
  auto unknown = engine::apply_operation(state, "role.enhance", nlohmann::json::object());
  REQUIRE_FALSE(unknown.ok());
  CHECK(unknown.error().code == ErrorCode::UnknownOperation);

  auto bad_payload = engine::apply_operation(state, "role.remove", nlohmann::json::object());
  REQUIRE_FALSE(bad_payload.ok());
  CHECK(bad_payload.error().code == ErrorCode::InvalidEvent);
  CHECK(state.version == 0);

  REQUIRE(engine::apply_operation(
              state, "role.add",
              {{"id", {{"kind", "role"}, {"value", "r"}}}, {"description", ""},
               {"metadata", nlohmann::json::object()}})
              .ok());
  CHECK(state.version == 1);
  CHECK(state.roles.contains("r"));
}

TEST_CASE("random operation soup preserves referential integrity") {
  std::mt19937_64 rng(20260825);
  Engine e = fresh_engine();
  const auto pick_id = [&rng](const char* prefix, int n) {
    return std::string(prefix) + std::to_string(std::uniform_int_distribution<int>(0, n - 1)(rng));
  };

  int accepted = 0;
  for (int step = 0; step < 400; ++step) {
    const std::string before = engine::canonical_state(e.state_copy());
    const auto events_before = e.applied_events();
    const int op = std::uniform_int_distribution<int>(0, 9)(rng);
    Result<void> outcome = {};
    switch (op) {
      case 0: {
        auto added = e.add_role(kScope, {rid(pick_id("r", 6)), "", {}});
        outcome = added.ok() ? Result<void>{} : Result<void>{added.error()};
        break;
      }
      case 1: outcome = e.remove_role(kScope, pick_id("r", 6)); break;
      case 2: {
        const auto id = pick_id("u", 6);
        auto added = e.add_user(kScope, {uid(id), std::nullopt, {}, true});
        outcome = added.ok() ? Result<void>{} : Result<void>{added.error()};
        break;
      }
      case 3: outcome = e.remove_user(kScope, pick_id("u", 6)); break;
      case 4: {
        const auto id = pick_id("f", 4);
        auto added = e.register_function(kScope, {fid(id), "T", id, std::nullopt});
        outcome = added.ok() ? Result<void>{} : Result<void>{added.error()};
        break;
      }
      case 5: outcome = e.remove_function(kScope, pick_id("f", 4)); break;
      case 6: outcome = e.assign_role(kScope, pick_id("u", 6), pick_id("r", 6)); break;
      case 7: outcome = e.revoke_role(kScope, pick_id("u", 6), pick_id("r", 6)); break;
      case 8: outcome = e.bind_policy(kScope, pick_id("f", 4), pick_id("r", 6)); break;
      case 9: outcome = e.unbind_policy(kScope, pick_id("f", 4), pick_id("r", 6)); break;
    }
    if (outcome.ok()) {
      ++accepted;
      CHECK(e.applied_events() == events_before + 1);
    } else {
      // Rejections must be invisible.
      CHECK(engine::canonical_state(e.state_copy()) == before);
      CHECK(e.applied_events() == events_before);
    }
    REQUIRE(testsupport::state_integrity_ok(e.state_copy()));
  }
  // Sanity: the soup actually exercised both branches.
  CHECK(accepted > 50);
  CHECK(accepted < 400);
}

TEST_CASE("differential: role fetches agree with the raw-pair oracle") {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 20; ++round) {
    const auto fx = testsupport::random_fixture(rng, 12, 8, 6);
    Engine e = fresh_engine();
    REQUIRE(testsupport::load_fixture(e, fx).ok());
    for (const std::string& u : fx.users) {
      auto roles = e.get_user_roles(u);
      REQUIRE(roles.ok());
      const auto expected = testsupport::oracle_user_roles(fx, u);
      CHECK(std::vector<std::string>(roles.value().begin(), roles.value().end()) == expected);
    }
    CHECK(e.get_user_roles("nobody").error().code == ErrorCode::UserNotFound);
    CHECK(e.get_function_roles("nothing").error().code == ErrorCode::FunctionNotFound);
  }
}
