#pragma once

#include <stdexcept>
#include <string>

namespace delaycent {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input or an argument outside an operation's domain.
class InputError : public Error {
 public:
  using Error::Error;
};

/// The requested delay lies outside the stability region, or the graph is
/// disconnected so no stability region exists.
class StabilityError : public Error {
 public:
  StabilityError(const std::string& what, double tau_max)
      : Error(what), tau_max_(tau_max) {}

  double tau_max() const noexcept { return tau_max_; }

 private:
  double tau_max_;
};

/// A numerical procedure failed: non-finite kernel values, quadrature budget
/// exhausted, a diverging simulation.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace delaycent
