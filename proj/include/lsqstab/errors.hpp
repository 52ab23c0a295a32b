#pragma once

#include <stdexcept>
#include <string>

namespace lsqstab {

/// Argument outside the mathematical domain of an operation (x outside [a,b], u outside [0,1], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Request for a configuration the library does not model (e.g. the shrunk-measure basis beyond m = 2).
class Unsupported : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Adaptive quadrature ran out of subdivision depth before meeting its tolerance.
/// Carries the best available estimate and the accumulated error bound.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

/// Output file could not be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lsqstab
