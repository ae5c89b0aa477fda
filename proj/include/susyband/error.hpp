#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace susyband {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Failure of a numerical procedure (integrator, root bracketing, ...).
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double location)
      : Error(what), location_(location) {}
  explicit NumericalError(const std::string& what) : Error(what) {}

  double location() const noexcept { return location_; }

 private:
  double location_ = 0.0;
};

// A transformation function vanishes (u for order 1, W for order 2)
// inside the working window.
class SingularTransformError : public Error {
 public:
  SingularTransformError(const std::string& what, std::vector<double> locations)
      : Error(what), locations_(std::move(locations)) {}

  const std::vector<double>& locations() const noexcept { return locations_; }

 private:
  std::vector<double> locations_;
};

// Malformed configuration or serialized document.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace susyband
