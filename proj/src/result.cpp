#include "drbac/result.h"

namespace drbac {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyId: return "empty_id";
    case ErrorCode::IllegalCharacter: return "illegal_character";
    case ErrorCode::TooLong: return "too_long";
    case ErrorCode::DuplicateRole: return "duplicate_role";
    case ErrorCode::RoleNotFound: return "role_not_found";
    case ErrorCode::RoleInUse: return "role_in_use";
    case ErrorCode::DuplicateFunction: return "duplicate_function";
    case ErrorCode::FunctionNotFound: return "function_not_found";
    case ErrorCode::FunctionInUse: return "function_in_use";
    case ErrorCode::DuplicateUser: return "duplicate_user";
    case ErrorCode::DuplicateExternalRef: return "duplicate_external_ref";
    case ErrorCode::UserNotFound: return "user_not_found";
    case ErrorCode::UserHasRoles: return "user_has_roles";
    case ErrorCode::DuplicateAssignment: return "duplicate_assignment";
    case ErrorCode::AssignmentNotFound: return "assignment_not_found";
    case ErrorCode::DuplicateBinding: return "duplicate_binding";
    case ErrorCode::BindingNotFound: return "binding_not_found";
    case ErrorCode::ThresholdViolation: return "threshold_violation";
    case ErrorCode::ScopeViolation: return "scope_violation";
    case ErrorCode::StorageFailure: return "storage_failure";
    case ErrorCode::ChainBroken: return "chain_broken";
    case ErrorCode::UnknownOperation: return "unknown_operation";
    case ErrorCode::InvalidEvent: return "invalid_event";
    case ErrorCode::SnapshotCorrupt: return "snapshot_corrupt";
    case ErrorCode::UnknownLogicVersion: return "unknown_logic_version";
    case ErrorCode::DuplicateRegistration: return "duplicate_registration";
    case ErrorCode::HandlerNotRegistered: return "handler_not_registered";
    case ErrorCode::DuplicateRequest: return "duplicate_request";
    case ErrorCode::AuthorizationDenied: return "authorization_denied";
    case ErrorCode::HandlerFailure: return "handler_failure";
    case ErrorCode::UnknownRoleInImport: return "unknown_role_in_import";
    case ErrorCode::DuplicateUserInImport: return "duplicate_user_in_import";
    case ErrorCode::ParseError: return "parse_error";
    case ErrorCode::FixtureTooLarge: return "fixture_too_large";
    case ErrorCode::UnknownActor: return "unknown_actor";
    case ErrorCode::InvalidToken: return "invalid_token";
    case ErrorCode::BadRequest: return "bad_request";
    case ErrorCode::InternalError: return "internal_error";
  }
  return "internal_error";
}

nlohmann::json error_to_json(const Error& error) {
  nlohmann::json body{
      {"error", std::string(error_code_name(error.code))},
      {"message", error.message},
  };
  if (!error.details.empty()) {
    body["details"] = error.details;
  }
  return body;
}

}  // namespace drbac
