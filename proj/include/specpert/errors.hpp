#pragma once

#include <stdexcept>
#include <string>

namespace specpert {

/// Violated precondition or malformed input. Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Solver or quadrature failure on otherwise valid input. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace specpert
