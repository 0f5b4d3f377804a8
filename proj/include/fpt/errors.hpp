#pragma once

#include <stdexcept>
#include <string>

namespace fpt {

/// Invalid configuration or malformed input, detected before any computation.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation (t <= 0, x0 on a
/// boundary, pole of a special function, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed to reach its accuracy target.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A series or iteration did not settle within its budget.
class ConvergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws DomainError with `what` unless `cond` holds.
void require_domain(bool cond, const std::string& what);

/// Throws ValidationError with `what` unless `cond` holds.
void require_valid(bool cond, const std::string& what);

}  // namespace fpt
