#ifndef SLIM_ERROR_HPP
#define SLIM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace slim {

/// Malformed input, inconsistent shapes, unsatisfiable data requests.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite rates, losses or gradients, or a solver that failed to converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated a documented precondition.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace slim

#endif  // SLIM_ERROR_HPP
