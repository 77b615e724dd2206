#include "polarcone/error.hpp"

namespace polarcone {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyMap: return "empty_map";
    case ErrorCode::InvalidMeasure: return "invalid_measure";
    case ErrorCode::NegativeTime: return "negative_time";
    case ErrorCode::LengthMismatch: return "length_mismatch";
    case ErrorCode::NotMonotone: return "not_monotone";
    case ErrorCode::SupportExceedsGrid: return "support_exceeds_grid";
    case ErrorCode::GridMismatch: return "grid_mismatch";
    case ErrorCode::CountTooSmall: return "count_too_small";
    case ErrorCode::EmptyBasis: return "empty_basis";
    case ErrorCode::DegenerateDeformation: return "degenerate_deformation";
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Inconsistent: return "inconsistent";
    case ErrorCode::Parse: return "parse";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

}  // namespace polarcone
