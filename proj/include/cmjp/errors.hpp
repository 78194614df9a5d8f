#pragma once

#include <stdexcept>
#include <string>

namespace cmjp {

// Bad input: malformed data, violated preconditions, out-of-range values.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure could not produce a meaningful result.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrixError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Input outside the domain where a closed form is defined (zero rates,
// eigenvalues with nonpositive real part, ...).
class DomainError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Every regime assigns zero likelihood to the observed history.
class DegeneratePosteriorError : public NumericError {
 public:
  using NumericError::NumericError;
};

class EstimationError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace cmjp
