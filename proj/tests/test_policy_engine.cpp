#include <doctest.h>

#include <random>
#include <vector>

#include "drbac/policy/engine.h"

using namespace drbac;
using policy::EvaluationInput;
using policy::PolicyMode;
using model::DecisionReason;

namespace {

EvaluationInput make_input(model::RoleIdSet user_roles, model::RoleIdSet function_roles,
                           PolicyMode mode = PolicyMode::any_of()) {
  EvaluationInput input;
  input.user_roles = std::move(user_roles);
  input.function_roles = std::move(function_roles);
  input.mode = mode;
  return input;
}

model::RoleIdSet random_roles(std::mt19937_64& rng, int universe, int max_count) {
  model::RoleIdSet out;
  const int count = std::uniform_int_distribution<int>(0, max_count)(rng);
  for (int i = 0; i < count; ++i) {
    out.insert("r" + std::to_string(std::uniform_int_distribution<int>(0, universe - 1)(rng)));
  }
  return out;
}

}  // namespace

TEST_CASE("any-of allows exactly when the intersection is non-empty") {
  auto allow = policy::evaluate(make_input({"r1", "r2"}, {"r2", "r3"}));
  CHECK(allow.allowed);
  CHECK(allow.reason == DecisionReason::Matched);
  CHECK(allow.matched_roles == model::RoleIdSet{"r2"});

  auto deny = policy::evaluate(make_input({"r1", "r2"}, {"r3", "r4"}));
  CHECK_FALSE(deny.allowed);
  CHECK(deny.reason == DecisionReason::NoRoleIntersection);
  CHECK(deny.matched_roles.empty());
}

TEST_CASE("empty role sets always deny under any-of") {
  CHECK_FALSE(policy::evaluate(make_input({}, {"r1"})).allowed);
  CHECK_FALSE(policy::evaluate(make_input({"r1"}, {})).allowed);
  CHECK_FALSE(policy::evaluate(make_input({}, {})).allowed);
}

TEST_CASE("m-of-p compares the intersection size against the threshold") {
  const auto mode2 = PolicyMode::m_of_p(2).value();
  auto allow = policy::evaluate(make_input({"a", "b", "c"}, {"a", "b", "d"}, mode2));
  CHECK(allow.allowed);
  CHECK(allow.matched_roles == model::RoleIdSet{"a", "b"});

  const auto mode3 = PolicyMode::m_of_p(3).value();
  auto below = policy::evaluate(make_input({"a", "b", "c"}, {"a", "b", "d"}, mode3));
  CHECK_FALSE(below.allowed);
  CHECK(below.reason == DecisionReason::ThresholdNotMet);
  CHECK(below.matched_roles == model::RoleIdSet{"a", "b"});
}

TEST_CASE("m-of-p distinguishes empty intersection from a missed threshold") {
  const auto mode = PolicyMode::m_of_p(2).value();
  auto empty = policy::evaluate(make_input({"x"}, {"a", "b"}, mode));
  CHECK_FALSE(empty.allowed);
  CHECK(empty.reason == DecisionReason::NoRoleIntersection);
}

TEST_CASE("deny precedence: unknown user, unknown function, inactive, policy") {
  EvaluationInput input = make_input({"a"}, {"a"});
  input.user_known = false;
  input.function_known = false;
  input.user_active = false;
  CHECK(policy::evaluate(input).reason == DecisionReason::UnknownUser);

  input.user_known = true;
  CHECK(policy::evaluate(input).reason == DecisionReason::UnknownFunction);

  input.function_known = true;
  CHECK(policy::evaluate(input).reason == DecisionReason::InactiveUser);

  input.user_active = true;
  CHECK(policy::evaluate(input).allowed);
}

TEST_CASE("matched roles are reported even on early denials") {
  EvaluationInput input = make_input({"a", "b"}, {"b", "c"});
  input.user_active = false;
  auto decision = policy::evaluate(input);
  CHECK_FALSE(decision.allowed);
  CHECK(decision.matched_roles == model::RoleIdSet{"b"});
}

TEST_CASE("threshold of zero is rejected at construction") {
  auto mode = PolicyMode::m_of_p(0);
  REQUIRE_FALSE(mode.ok());
  CHECK(mode.error().code == ErrorCode::ThresholdViolation);
}

TEST_CASE("mode round trips through its text spelling") {
  CHECK(PolicyMode::any_of().to_string() == "anyof");
  CHECK(PolicyMode::m_of_p(3).value().to_string() == "mofp:3");
  CHECK(PolicyMode::parse("anyof").value() == PolicyMode::any_of());
  CHECK(PolicyMode::parse("mofp:3").value() == PolicyMode::m_of_p(3).value());
  CHECK_FALSE(PolicyMode::parse("mofp:0").ok());
  CHECK_FALSE(PolicyMode::parse("mofp:").ok());
  CHECK_FALSE(PolicyMode::parse("mofp:x").ok());
  CHECK_FALSE(PolicyMode::parse("sometimes").ok());
}

TEST_CASE("mode round trips through json") {
  for (const auto& mode : {PolicyMode::any_of(), PolicyMode::m_of_p(5).value()}) {
    const nlohmann::json j = mode;
    auto back = policy::mode_from_json(j);
    REQUIRE(back.ok());
    CHECK(back.value() == mode);
  }
  CHECK_FALSE(policy::mode_from_json(nlohmann::json{{"kind", "quorum"}}).ok());
}

TEST_CASE("property: any-of is equivalent to a threshold of one") {
  std::mt19937_64 rng(101);
  const auto one = PolicyMode::m_of_p(1).value();
  for (int iteration = 0; iteration < 300; ++iteration) {
    const auto user = random_roles(rng, 15, 8);
    const auto fn = random_roles(rng, 15, 8);
    const auto any = policy::evaluate(make_input(user, fn));
    const auto threshold = policy::evaluate(make_input(user, fn, one));
    CHECK(any.allowed == threshold.allowed);
    CHECK(any.matched_roles == threshold.matched_roles);
  }
}

TEST_CASE("property: granting more roles never revokes access") {
  std::mt19937_64 rng(202);
  for (int iteration = 0; iteration < 300; ++iteration) {
    const auto user = random_roles(rng, 15, 6);
    const auto fn = random_roles(rng, 15, 6);
    const auto m = std::uniform_int_distribution<std::uint32_t>(1, 4)(rng);
    const auto mode = PolicyMode::m_of_p(m).value();

    auto grown = user;
    grown.insert("r" + std::to_string(std::uniform_int_distribution<int>(0, 14)(rng)));

    for (const auto& policy_mode : {PolicyMode::any_of(), mode}) {
      const bool before = policy::evaluate(make_input(user, fn, policy_mode)).allowed;
      const bool after = policy::evaluate(make_input(grown, fn, policy_mode)).allowed;
      if (before) CHECK(after);
    }
  }
}

TEST_CASE("property: lowering the threshold never revokes access") {
  std::mt19937_64 rng(303);
  for (int iteration = 0; iteration < 300; ++iteration) {
    const auto user = random_roles(rng, 12, 6);
    const auto fn = random_roles(rng, 12, 6);
    const auto m = std::uniform_int_distribution<std::uint32_t>(2, 5)(rng);
    const bool at_m =
        policy::evaluate(make_input(user, fn, PolicyMode::m_of_p(m).value())).allowed;
    const bool at_lower =
        policy::evaluate(make_input(user, fn, PolicyMode::m_of_p(m - 1).value())).allowed;
    if (at_m) CHECK(at_lower);
  }
}

TEST_CASE("property: evaluation is deterministic and symmetric in the intersection") {
  std::mt19937_64 rng(404);
  for (int iteration = 0; iteration < 200; ++iteration) {
    const auto a = random_roles(rng, 10, 6);
    const auto b = random_roles(rng, 10, 6);
    const auto first = policy::evaluate(make_input(a, b));
    const auto second = policy::evaluate(make_input(a, b));
    CHECK(first.allowed == second.allowed);
    CHECK(first.reason == second.reason);
    CHECK(first.matched_roles == second.matched_roles);
    CHECK(first.cost == second.cost);
    // Swapping the sets flips which side is scanned but not the intersection.
    CHECK(policy::evaluate(make_input(b, a)).matched_roles == first.matched_roles);
  }
}

TEST_CASE("evaluate batch matches element-wise evaluation") {
  std::mt19937_64 rng(505);
  std::vector<EvaluationInput> inputs;
  for (int i = 0; i < 50; ++i) {
    auto input = make_input(random_roles(rng, 10, 5), random_roles(rng, 10, 5));
    if (i % 3 == 0) input.user_active = false;
    if (i % 7 == 0) input.user_known = false;
    inputs.push_back(input);
  }
  const auto batch = policy::evaluate_batch(inputs);
  REQUIRE(batch.size() == inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto single = policy::evaluate(inputs[i]);
    CHECK(batch[i].allowed == single.allowed);
    CHECK(batch[i].reason == single.reason);
    CHECK(batch[i].matched_roles == single.matched_roles);
  }
}

TEST_CASE("evaluation charges one compare per function role") {
  const cost::CostSchedule schedule;
  auto decision = policy::evaluate(make_input({"a"}, {"a", "b", "c"}), schedule, {});
  CHECK(decision.cost.compares == 3);
  CHECK(decision.cost.total == 3 * schedule.compare_cost);

  // The threshold test adds one more compare under m-of-p.
  auto threshold = policy::evaluate(
      make_input({"a"}, {"a", "b", "c"}, PolicyMode::m_of_p(1).value()), schedule, {});
  CHECK(threshold.cost.compares == 4);
}

TEST_CASE("early denials charge no compares") {
  const cost::CostSchedule schedule;
  EvaluationInput input = make_input({"a"}, {"a", "b"});
  input.user_known = false;
  CHECK(policy::evaluate(input, schedule, {}).cost.compares == 0);

  input.user_known = true;
  input.user_active = false;
  CHECK(policy::evaluate(input, schedule, {}).cost.compares == 0);
}

TEST_CASE("a primed counter carries through to the receipt") {
  const cost::CostSchedule schedule;
  cost::CostCounter counter;
  counter.add_reads(5);
  auto decision = policy::evaluate(make_input({"a"}, {"a"}), schedule, counter);
  CHECK(decision.cost.reads == 5);
  CHECK(decision.cost.compares == 1);
  CHECK(decision.cost.total == 5 * schedule.read_cost + 1 * schedule.compare_cost);
}

TEST_CASE("decision serializes with reason name and receipt") {
  auto decision = policy::evaluate(make_input({"a"}, {"a"}));
  const nlohmann::json j = decision;
  CHECK(j.at("allowed") == true);
  CHECK(j.at("reason") == "matched");
  CHECK(j.at("matched_roles") == nlohmann::json::array({"a"}));
  CHECK(j.at("cost").at("compares") == 1);
  CHECK(j.at("cost").at("total").is_number_unsigned());
}

TEST_CASE("decision reason names round trip") {
  using model::decision_reason_name;
  using model::decision_reason_from_name;
  for (const auto reason :
       {DecisionReason::Matched, DecisionReason::NoRoleIntersection,
        DecisionReason::ThresholdNotMet, DecisionReason::UnknownUser,
        DecisionReason::UnknownFunction, DecisionReason::InactiveUser}) {
    auto back = decision_reason_from_name(decision_reason_name(reason));
    REQUIRE(back.ok());
    CHECK(back.value() == reason);
  }
  CHECK_FALSE(decision_reason_from_name("because").ok());
}
