#pragma once

// Shared helpers for the unit suites: error-code capture and relative
// comparison against closed-form oracles.

#include <cmath>
#include <optional>

#include "errors.hpp"

namespace testsup {

template <class Fn>
std::optional<mlab::ErrorCode> thrown_code(Fn&& fn) {
  try {
    fn();
  } catch (const mlab::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// |got - want| measured against |want| (or 1 when want ~ 0).
inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-30);
}

}  // namespace testsup
