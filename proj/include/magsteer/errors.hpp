#pragma once

#include <stdexcept>
#include <string>

namespace magsteer {

/// Base class for all recoverable numerical failures raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

/// Lyapunov solve requested on a drift matrix with a non-negative margin.
class UnstableSystem : public Error {
 public:
  UnstableSystem(const std::string& what, double margin)
      : Error(what), margin_(margin) {}
  double margin() const noexcept { return margin_; }

 private:
  double margin_;
};

class SingularSolve : public Error {
 public:
  using Error::Error;
};

class MaxStepsExceeded : public Error {
 public:
  MaxStepsExceeded(const std::string& what, double last_norm)
      : Error(what), last_norm_(last_norm) {}
  /// Frobenius norm of the covariance when the step budget ran out.
  double last_norm() const noexcept { return last_norm_; }

 private:
  double last_norm_;
};

class NonPositiveVariance : public Error {
 public:
  using Error::Error;
};

class ComplexEigenvalue : public Error {
 public:
  using Error::Error;
};

class DegenerateCM : public Error {
 public:
  using Error::Error;
};

class NoThresholdInRange : public Error {
 public:
  using Error::Error;
};

}  // namespace magsteer
