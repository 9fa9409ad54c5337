#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ccopf {

// Malformed case-file text. Carries the 1-based line of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that violates a model invariant (bad reactance, no slack, ...).
class ValidationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside the documented domain of an operation.
class ParameterError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Factorization, convergence, or iteration-limit failure.
class NumericalError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ccopf
