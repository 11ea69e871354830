#pragma once

#include <stdexcept>
#include <string>

namespace matern {

/// Argument outside the mathematical domain of an operation (d < 0, nu <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Result not representable as a finite double; the log-domain variant should be used.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Parameter combination that yields an invalid (non positive definite) kernel,
/// e.g. great-circle distance with nu > 1/2.
class ValidityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotPositiveDefiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A construction that is positive definite by theory failed its check.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace matern
