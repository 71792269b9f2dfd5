#pragma once

#include <stdexcept>
#include <string>

namespace nulltank {

/// Malformed or inconsistent configuration (bad scenario file, invalid
/// parameter combination, dimension mismatch in user input).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Task Jacobian lost row rank; carries the offending smallest singular value.
class SingularityError : public std::runtime_error {
 public:
  SingularityError(const std::string& what, double sigma_min)
      : std::runtime_error(what), sigma_min_(sigma_min) {}

  double sigma_min() const { return sigma_min_; }

 private:
  double sigma_min_;
};

/// Non-finite value produced during integration.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nulltank
