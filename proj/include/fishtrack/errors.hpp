#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fishtrack {

/// Raised when an argument violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by the MOT and config readers; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  ParseError(const std::string& source, const ParseError& inner)
      : std::runtime_error(source + ": " + inner.what()), line_(inner.line()) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A metric whose denominator vanishes (e.g. MOTA with no ground truth).
class UndefinedMetric : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace fishtrack
