#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spinevo {

enum class ErrorCode {
  precondition,     // caller violated an operation precondition
  domain,           // time outside a field program's domain
  configuration,    // malformed field program or scenario content
  accuracy,         // integration too coarse for the requested check
  not_applicable,   // analysis premise does not hold for this input
  missing_key,
  malformed_number,
  non_unit_axis,
  unknown_field_kind,
  unknown_key,
  io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::domain: return "domain";
    case ErrorCode::configuration: return "configuration";
    case ErrorCode::accuracy: return "accuracy";
    case ErrorCode::not_applicable: return "not_applicable";
    case ErrorCode::missing_key: return "missing_key";
    case ErrorCode::malformed_number: return "malformed_number";
    case ErrorCode::non_unit_axis: return "non_unit_axis";
    case ErrorCode::unknown_field_kind: return "unknown_field_kind";
    case ErrorCode::unknown_key: return "unknown_key";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace spinevo
