#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace persist {

enum class ErrorCode {
  InvalidParameter,
  NotSupercritical,
  SpectralGapTooSmall,
  TrivialExtinction,
  NotFound,
  AbsorbedState,
  DegenerateProduct,
  NotApplicable,
  NoSignChange,
  TooFewPoints,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a machine-readable code. The
// optional field names the offending input (e.g. "b" for a bad rate).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field = {})
      : std::runtime_error(message), code_(code), field_(std::move(field)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

}  // namespace persist
