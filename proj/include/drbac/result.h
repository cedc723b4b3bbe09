#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <utility>
#include <variant>

namespace drbac {

enum class ErrorCode {
  // identifier validation
  EmptyId,
  IllegalCharacter,
  TooLong,
  // role manager
  DuplicateRole,
  RoleNotFound,
  RoleInUse,
  // function manager
  DuplicateFunction,
  FunctionNotFound,
  FunctionInUse,
  // user manager
  DuplicateUser,
  DuplicateExternalRef,
  UserNotFound,
  UserHasRoles,
  DuplicateAssignment,
  AssignmentNotFound,
  // policy manager
  DuplicateBinding,
  BindingNotFound,
  ThresholdViolation,
  // admin scoping
  ScopeViolation,
  // ledger
  StorageFailure,
  ChainBroken,
  UnknownOperation,
  InvalidEvent,
  SnapshotCorrupt,
  UnknownLogicVersion,
  // dispatcher
  DuplicateRegistration,
  HandlerNotRegistered,
  DuplicateRequest,
  AuthorizationDenied,
  HandlerFailure,
  // bulk import
  UnknownRoleInImport,
  DuplicateUserInImport,
  ParseError,
  // cost meter
  FixtureTooLarge,
  // api
  UnknownActor,
  InvalidToken,
  BadRequest,
  InternalError,
};

// Stable snake_case code names used in JSON bodies and CLI diagnostics.
std::string_view error_code_name(ErrorCode code);

struct Error {
  ErrorCode code;
  std::string message;
  nlohmann::json details = nlohmann::json::object();
};

inline Error make_error(ErrorCode code, std::string message,
                        nlohmann::json details = nlohmann::json::object()) {
  return Error{code, std::move(message), std::move(details)};
}

nlohmann::json error_to_json(const Error& error);

template <typename T>
class [[nodiscard]] Result {
 public:
  Result(T value) : inner_(std::in_place_index<0>, std::move(value)) {}
  Result(Error error) : inner_(std::in_place_index<1>, std::move(error)) {}

  bool ok() const { return inner_.index() == 0; }
  explicit operator bool() const { return ok(); }

  T& value() & { return std::get<0>(inner_); }
  const T& value() const& { return std::get<0>(inner_); }
  T&& value() && { return std::get<0>(std::move(inner_)); }

  const Error& error() const& { return std::get<1>(inner_); }
  Error&& error() && { return std::get<1>(std::move(inner_)); }

 private:
  std::variant<T, Error> inner_;
};

template <>
class [[nodiscard]] Result<void> {
 public:
  Result() = default;
  Result(Error error) : error_(std::move(error)) {}

  bool ok() const { return !error_.has_value(); }
  explicit operator bool() const { return ok(); }

  const Error& error() const& { return *error_; }
  Error&& error() && { return *std::move(error_); }

 private:
  std::optional<Error> error_;
};

}  // namespace drbac
