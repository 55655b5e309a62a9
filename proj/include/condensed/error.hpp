#pragma once

#include <stdexcept>
#include <string>

namespace condensed {

/// Malformed input or a call that violates an operation's precondition.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Text that could not be parsed; `column` is 1-based, 0 when unknown.
class ParseError : public UsageError {
 public:
  ParseError(const std::string& what, std::size_t column)
      : UsageError(column ? "column " + std::to_string(column) + ": " + what : what),
        column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

/// A configured resource bound (ball size, freshness length) was exceeded.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An attempt to re-pin a membership bit to the opposite value.
class ConflictError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace condensed
