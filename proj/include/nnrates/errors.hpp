#pragma once

#include <stdexcept>
#include <string>

namespace nnrates {

// Base for every error raised by the library. The CLI maps subclasses to
// process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A point lies outside the declared domain of a metric space.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A caller-supplied argument violates an operation's precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A quantity is undefined for the given input (e.g. η of a zero-mass ball).
class UndefinedValueError : public Error {
 public:
  using Error::Error;
};

// The requested evaluation method does not apply to this family.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Bound parameters cannot be formed (e.g. k ≤ 4 ln(2/δ) in the upper bound).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// An exact oracle would exceed its enumeration budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nnrates
