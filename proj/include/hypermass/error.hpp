#pragma once

#include <stdexcept>
#include <string>

namespace hypermass {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad geometric input: off-hyperboloid points, degenerate tangents,
/// non-positive-definite metrics, mismatched curvature scales.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Instability or non-finite values during a flow.  Carries the flow
/// parameter at which it was detected.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double rho) : Error(what), rho_(rho) {}
  double rho() const { return rho_; }

 private:
  double rho_;
};

/// Invalid or unreadable configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Precondition on the input data (for example H <= 0) that is not a geometric
/// defect of the surface itself.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace hypermass
