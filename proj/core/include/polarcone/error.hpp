#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polarcone {

enum class ErrorCode {
  EmptyMap,
  InvalidMeasure,
  NegativeTime,
  LengthMismatch,
  NotMonotone,
  SupportExceedsGrid,
  GridMismatch,
  CountTooSmall,
  EmptyBasis,
  DegenerateDeformation,
  InvalidArgument,
  Inconsistent,
  Parse,
};

/// Short stable identifier for an error code, e.g. "support_exceeds_grid".
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace polarcone
