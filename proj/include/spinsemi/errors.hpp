#pragma once

#include <stdexcept>
#include <string>

namespace spinsemi {

// Bad input: malformed labels, failed preconditions, non-density matrices.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A value left the domain of the scalar function it was fed to.
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A numerical procedure did not converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spinsemi
