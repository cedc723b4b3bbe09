#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "drbac/cost/meter.h"
#include "drbac/result.h"

namespace drbac::cost {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Ordinary least squares of ys over xs. A flat series (zero variance in ys)
// fits itself perfectly: r2 = 1 when residuals are zero.
FitResult least_squares(const std::vector<double>& xs, const std::vector<double>& ys);

struct ScalingPoint {
  std::uint64_t n_roles = 0;
  double dynamic_mean = 0.0;
  double static_mean = 0.0;
};

struct ScalingReport {
  std::vector<std::uint64_t> role_counts;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<ScalingPoint> points;
  FitResult dynamic_fit;
  FitResult static_fit;
};

// Largest role count a benchmark fixture may request.
inline constexpr std::uint64_t kMaxBenchRoles = 1'000'000;

// For each role count: builds a state with that many roles, one user holding
// one of them, and one function whose policy requires that same role; meters
// the dynamic check and the simulated static baseline check; averages over
// `trials` seeded runs. The dynamic series stays flat because the check never
// touches roles off the evaluated path; the baseline walks all of them.
Result<ScalingReport> bench_scaling(const std::vector<std::uint64_t>& role_counts,
                                    std::uint64_t trials, std::uint64_t seed,
                                    const CostSchedule& schedule);

nlohmann::json report_to_json(const ScalingReport& report);
std::string report_to_table(const ScalingReport& report);

}  // namespace drbac::cost
