#pragma once

#include <stdexcept>
#include <string>

namespace rpde {

/// Invalid configuration: bad grids, mismatched shapes, unknown keys,
/// out-of-range parameters, wrong constructor for the object at hand.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A stated precondition of an operation does not hold for the given inputs.
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure at run time: CFL budget exhausted, non-finite fields,
/// coercivity violation, factorization failure, not enough data for a fit.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rpde
