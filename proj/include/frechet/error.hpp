#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace frechet {

enum class ErrorKind {
  MixedSpacePoints,
  InvalidPoint,
  NonFiniteValue,
  NoConvergence,
  NearSingularHessian,
  NearSingularCovariance,
  CutLocus,
  NonUniqueProjection,
  NotPositiveDefinite,
  InvalidDescriptor,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries one of the kinds above so that
// callers (the CLI, the Monte Carlo harness) can map it to a policy.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace frechet
