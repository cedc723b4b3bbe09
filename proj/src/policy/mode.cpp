#include "drbac/policy/mode.h"

#include <charconv>

namespace drbac::policy {

std::string PolicyMode::to_string() const {
  if (kind_ == Kind::AnyOf) {
    return "anyof";
  }
  return "mofp:" + std::to_string(m_);
}

Result<PolicyMode> PolicyMode::parse(std::string_view text) {
  if (text == "anyof") {
    return any_of();
  }
  constexpr std::string_view prefix = "mofp:";
  if (text.substr(0, prefix.size()) == prefix) {
    const std::string_view digits = text.substr(prefix.size());
    std::uint32_t m = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), m);
    if (ec == std::errc() && ptr == digits.data() + digits.size()) {
      return m_of_p(m);
    }
  }
  return make_error(ErrorCode::ParseError,
                    "mode must be 'anyof' or 'mofp:<m>', got '" + std::string(text) + "'");
}

void to_json(nlohmann::json& j, const PolicyMode& mode) {
  if (mode.is_any_of()) {
    j = nlohmann::json{{"kind", "any_of"}};
  } else {
    j = nlohmann::json{{"kind", "m_of_p"}, {"m", mode.threshold()}};
  }
}

Result<PolicyMode> mode_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    return make_error(ErrorCode::ParseError, "mode must be {kind[, m]}");
  }
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "any_of") {
    return PolicyMode::any_of();
  }
  if (kind == "m_of_p") {
    if (!j.contains("m") || !j["m"].is_number_unsigned()) {
      return make_error(ErrorCode::ParseError, "m_of_p mode requires unsigned m");
    }
    return PolicyMode::m_of_p(j["m"].get<std::uint32_t>());
  }
  return make_error(ErrorCode::ParseError, "unknown mode kind: " + kind);
}

}  // namespace drbac::policy
