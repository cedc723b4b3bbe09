#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>

#include "drbac/result.h"

namespace drbac::policy {

// Evaluation mode of a per-function policy: any-of (the default intersection
// rule) or a threshold requiring the caller to hold at least m of the policy's
// roles.
class PolicyMode {
 public:
  enum class Kind { AnyOf, MOfP };

  static PolicyMode any_of() { return PolicyMode(Kind::AnyOf, 0); }
  static Result<PolicyMode> m_of_p(std::uint32_t m) {
    if (m == 0) {
      return make_error(ErrorCode::ThresholdViolation, "m-of-p threshold must be at least 1");
    }
    return PolicyMode(Kind::MOfP, m);
  }

  Kind kind() const { return kind_; }
  bool is_any_of() const { return kind_ == Kind::AnyOf; }
  std::uint32_t threshold() const { return m_; }  // meaningful for MOfP only

  bool operator==(const PolicyMode&) const = default;

  // "anyof" or "mofp:<m>" — the CLI spelling.
  std::string to_string() const;
  static Result<PolicyMode> parse(std::string_view text);

 private:
  PolicyMode(Kind kind, std::uint32_t m) : kind_(kind), m_(m) {}

  Kind kind_;
  std::uint32_t m_;
};

void to_json(nlohmann::json& j, const PolicyMode& mode);
Result<PolicyMode> mode_from_json(const nlohmann::json& j);

}  // namespace drbac::policy
