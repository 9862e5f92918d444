#pragma once

#include <stdexcept>
#include <string>

namespace crib {

/// Invalid input: bad configuration values, violated preconditions.
/// The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Integration or quadrature broke down (non-finite values, step underflow,
/// norm drift). The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace crib
