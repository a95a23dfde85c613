#pragma once

#include <stdexcept>
#include <string>

namespace tfsrc {

// Bad input: out-of-range parameters, inconsistent sizes, malformed configs.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A computation that could not produce a trustworthy number
// (factorization failure, NaN in a time slice, series non-convergence).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tfsrc
