#pragma once

#include <stdexcept>
#include <string>

namespace mlab {

enum class ErrorCode {
  ParameterDomain,   // argument outside its documented domain
  Range,             // evaluation point outside [0,1] etc.
  DomainHypothesis,  // cusp-geometry hypothesis violated
  DegreeCap,         // polynomial degree beyond the supported cap
  Conditioning,      // basis too ill-conditioned at the requested degree
  QuadratureBudget,  // adaptive rule failed to converge within budget
  InsufficientData,  // fewer than two usable points in a fit
  Internal
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace mlab
