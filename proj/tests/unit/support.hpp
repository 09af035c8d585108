#pragma once

#include <doctest.h>

#include <functional>
#include <optional>

#include "quantfix/error.hpp"

namespace quantfix::testing {

/// Runs `f` and returns the code of the quantfix::Error it throws, if any.
inline std::optional<ErrorCode> error_code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace quantfix::testing

#define CHECK_ERROR_CODE(expr, expected) \
  CHECK(::quantfix::testing::error_code_of([&] { (void)(expr); }) == (expected))
