#include "quantfix/error.hpp"

namespace quantfix {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TailDivergence: return "TailDivergence";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::ConditionViolation: return "ConditionViolation";
    case ErrorCode::InterlacingViolation: return "InterlacingViolation";
    case ErrorCode::ResolutionError: return "ResolutionError";
    case ErrorCode::NotSorted: return "NotSorted";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what, std::optional<long> index)
    : std::runtime_error(std::string(to_string(code)) + ": " + what),
      code_(code),
      detail_(what),
      index_(index) {}

Error Error::at_step(long step) const {
  Error copy(code_, "at step " + std::to_string(step) + ": " + detail_, index_);
  copy.step_ = step;
  return copy;
}

}  // namespace quantfix
