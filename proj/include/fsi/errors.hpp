#pragma once

#include <stdexcept>
#include <string>

namespace fsi {

/// Invalid user input: bad grid size, negative rho, malformed config.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical procedure failed (singular factorization, no convergence,
/// violated invariant).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fsi
