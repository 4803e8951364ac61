#pragma once

#include <stdexcept>
#include <string>

namespace figopt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: dimension mismatches, invalid bounds, bad orders.
class InputError : public Error {
 public:
  using Error::Error;
};

// Parameter values outside the model's domain (e.g. theta2 <= theta1 for
// the compartmental mean).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Non-finite objective or integrand values.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

// Tensor grids or lattices larger than the configured cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

}  // namespace figopt
