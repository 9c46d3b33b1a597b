#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bmdlimits {

// An argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Arguments are valid but no solution exists (e.g. an attack that leaves no
// statistical trace, or a test budget that cannot reach the confidence).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. `line()` is 1-based; 0 when the error is not tied to
// a particular line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + (line ? ":" + std::to_string(line) : std::string()) +
                           ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace bmdlimits
