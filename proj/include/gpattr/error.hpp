#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gpattr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input. `line()` is 1-based for line-oriented sources, 0 otherwise.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A value violates a documented precondition or invariant.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The least-squares design cannot be solved (no data for the constant column).
class DegenerateDesign : public Error {
 public:
  using Error::Error;
};

/// Internal consistency check failed (thinning bound exceeded, probability out of range).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace gpattr
