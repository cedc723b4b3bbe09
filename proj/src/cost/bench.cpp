#include "drbac/cost/bench.h"

#include <iomanip>
#include <random>
#include <sstream>

#include "drbac/model/ids.h"

namespace drbac::cost {

FitResult least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  FitResult fit;
  const std::size_t n = xs.size();
  if (n == 0 || ys.size() != n) {
    return fit;
  }
  double sum_x = 0.0;
  double sum_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum_x += xs[i];
    sum_y += ys[i];
  }
  const double mean_x = sum_x / static_cast<double>(n);
  const double mean_y = sum_y / static_cast<double>(n);

  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
    sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
  }
  fit.slope = sxx == 0.0 ? 0.0 : sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;

  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double predicted = fit.intercept + fit.slope * xs[i];
    ss_res += (ys[i] - predicted) * (ys[i] - predicted);
    ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
  }
  fit.r2 = ss_tot == 0.0 ? (ss_res == 0.0 ? 1.0 : 0.0) : 1.0 - ss_res / ss_tot;
  return fit;
}

namespace {

struct Fixture {
  engine::EngineState state;
  std::set<std::string> all_roles;
};

model::EntityId must_parse(model::EntityKind kind, const std::string& raw) {
  auto id = model::EntityId::parse(kind, raw);
  return std::move(id).value();
}

Fixture build_fixture(std::uint64_t n_roles, std::uint64_t seed) {
  Fixture fixture;
  for (std::uint64_t i = 0; i < n_roles; ++i) {
    const std::string name = "role-" + std::to_string(i);
    fixture.state.roles.emplace(name,
                                model::Role{must_parse(model::EntityKind::Role, name), "", {}});
    fixture.all_roles.insert(name);
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> pick(0, n_roles - 1);
  const std::string bound = "role-" + std::to_string(pick(rng));

  const std::string user_id = "bench-user";
  fixture.state.users.emplace(
      user_id, model::User{must_parse(model::EntityKind::User, user_id), std::nullopt, {}, true});
  fixture.state.user_roles[user_id] = {bound};

  const std::string function_id = "bench-fn";
  fixture.state.functions.emplace(
      function_id, model::FunctionDef{must_parse(model::EntityKind::Function, function_id),
                                      "BenchTarget", "run", std::nullopt});
  fixture.state.policies.emplace(function_id,
                                 engine::Policy{function_id, {bound}, policy::PolicyMode::any_of()});
  return fixture;
}

}  // namespace

Result<ScalingReport> bench_scaling(const std::vector<std::uint64_t>& role_counts,
                                    std::uint64_t trials, std::uint64_t seed,
                                    const CostSchedule& schedule) {
  if (role_counts.empty()) {
    return make_error(ErrorCode::BadRequest, "role_counts must be non-empty");
  }
  for (std::size_t i = 0; i < role_counts.size(); ++i) {
    if (role_counts[i] == 0) {
      return make_error(ErrorCode::BadRequest, "role counts must be >= 1");
    }
    if (i > 0 && role_counts[i] <= role_counts[i - 1]) {
      return make_error(ErrorCode::BadRequest, "role_counts must be strictly increasing");
    }
    if (role_counts[i] > kMaxBenchRoles) {
      return make_error(ErrorCode::FixtureTooLarge,
                        "role count exceeds the benchmark fixture limit",
                        {{"limit", kMaxBenchRoles}, {"requested", role_counts[i]}});
    }
  }
  if (trials < 3) {
    return make_error(ErrorCode::BadRequest, "trials must be >= 3");
  }

  ScalingReport report;
  report.role_counts = role_counts;
  report.trials = trials;
  report.seed = seed;

  std::vector<double> xs;
  std::vector<double> dynamic_ys;
  std::vector<double> static_ys;
  for (const std::uint64_t n_roles : role_counts) {
    double dynamic_sum = 0.0;
    double static_sum = 0.0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
      const std::uint64_t trial_seed = seed * 1000003ULL + n_roles * 1009ULL + trial;
      const Fixture fixture = build_fixture(n_roles, trial_seed);
      dynamic_sum += static_cast<double>(
          meter_check(fixture.state, "bench-user", "bench-fn", schedule).total);
      StaticBaselineModel baseline{fixture.all_roles, schedule.deploy_base_static, true};
      static_sum += static_cast<double>(baseline.check_cost(schedule).total);
    }
    ScalingPoint point;
    point.n_roles = n_roles;
    point.dynamic_mean = dynamic_sum / static_cast<double>(trials);
    point.static_mean = static_sum / static_cast<double>(trials);
    report.points.push_back(point);
    xs.push_back(static_cast<double>(n_roles));
    dynamic_ys.push_back(point.dynamic_mean);
    static_ys.push_back(point.static_mean);
  }
  report.dynamic_fit = least_squares(xs, dynamic_ys);
  report.static_fit = least_squares(xs, static_ys);
  return report;
}

nlohmann::json report_to_json(const ScalingReport& report) {
  nlohmann::json points = nlohmann::json::array();
  for (const ScalingPoint& point : report.points) {
    points.push_back({{"dynamic_mean", point.dynamic_mean},
                      {"n_roles", point.n_roles},
                      {"static_mean", point.static_mean}});
  }
  const auto fit_json = [](const FitResult& fit) {
    return nlohmann::json{{"intercept", fit.intercept}, {"r2", fit.r2}, {"slope", fit.slope}};
  };
  return nlohmann::json{{"dynamic_fit", fit_json(report.dynamic_fit)},
                        {"points", points},
                        {"role_counts", report.role_counts},
                        {"seed", report.seed},
                        {"static_fit", fit_json(report.static_fit)},
                        {"trials", report.trials}};
}

std::string report_to_table(const ScalingReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(10) << "n_roles" << std::right << std::setw(16) << "dynamic_mean"
      << std::setw(16) << "static_mean" << '\n';
  out << std::string(42, '-') << '\n';
  for (const ScalingPoint& point : report.points) {
    out << std::left << std::setw(10) << point.n_roles << std::right << std::setw(16)
        << std::fixed << std::setprecision(1) << point.dynamic_mean << std::setw(16)
        << point.static_mean << '\n';
  }
  out << std::string(42, '-') << '\n';
  out << "dynamic fit: slope=" << std::setprecision(6) << report.dynamic_fit.slope
      << " intercept=" << report.dynamic_fit.intercept << " r2=" << report.dynamic_fit.r2 << '\n';
  out << "static  fit: slope=" << report.static_fit.slope
      << " intercept=" << report.static_fit.intercept << " r2=" << report.static_fit.r2 << '\n';
  out << "(static baseline walks every compiled-in role; the dynamic check reads only"
         " the evaluated path)\n";
  return out.str();
}

}  // namespace drbac::cost
