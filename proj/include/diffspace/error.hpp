#pragma once

#include <stdexcept>
#include <string>

namespace diffspace {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point left the open domain of a partial primitive (log, sqrt, division...).
class EvalError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A point (sample, cube image, start point) failed a space's membership test.
class MembershipError : public Error {
 public:
  using Error::Error;
};

/// Expression or config text could not be parsed.  Carries a 1-based location.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error(message + " at line " + std::to_string(line) + ", column " +
              std::to_string(column)),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// A precondition that is checked by sampling failed (closure, invariance,
/// star-shape, closedness certificate, cover flags...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace diffspace
