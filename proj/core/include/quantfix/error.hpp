#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace quantfix {

enum class ErrorCode {
  InvalidArgument,
  LengthMismatch,
  TailDivergence,
  BracketFailure,
  NoConvergence,
  DomainError,
  InsufficientData,
  ConditionViolation,
  InterlacingViolation,
  ResolutionError,
  NotSorted,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carried by every fallible operation in the library.
///
/// `index()` holds the offending sequence index (1-based) when one exists,
/// `step()` the iteration step for errors raised inside a fixed-point run.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what,
        std::optional<long> index = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<long> index() const noexcept { return index_; }
  std::optional<long> step() const noexcept { return step_; }

  /// Returns a copy annotated with the iteration step it occurred at.
  Error at_step(long step) const;

 private:
  ErrorCode code_;
  std::string detail_;
  std::optional<long> index_;
  std::optional<long> step_;
};

}  // namespace quantfix
