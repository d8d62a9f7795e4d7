#pragma once

#include <stdexcept>
#include <string>

namespace mtlab {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation called in a way its contract forbids (wrong node kind, mismatched trees, ...).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Requested object would not fit the configured size limits.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Malformed or invariant-violating input document.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mtlab
