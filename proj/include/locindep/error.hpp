#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace locindep {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset()` is the byte position of the problem.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Arithmetic outside a function's domain (log of non-positive, division by
/// zero, ...). Carries the printed offending subexpression.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, std::string subexpression)
      : Error(what + " in '" + subexpression + "'"),
        subexpression_(std::move(subexpression)) {}

  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

/// Structurally invalid process or family declaration, or a bad input file.
class SpecError : public Error {
 public:
  using Error::Error;
};

/// Failure while generating or post-processing paths.
class SimulationError : public Error {
 public:
  using Error::Error;
};

/// Likelihood undefined on the data (zero intensity at a jump, zero sigma).
class LikelihoodError : public Error {
 public:
  using Error::Error;
};

/// Failure inside a statistical procedure (rank deficiency, optimizer, ...).
class InferenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace locindep
