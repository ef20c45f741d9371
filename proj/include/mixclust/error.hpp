#pragma once

#include <stdexcept>
#include <string>

namespace mixclust {

// Bad caller input (shapes, ranges, counts).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Dimension mismatch between tensors/factors.
class ShapeError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

// A probability or intensity outside the domain where a log-likelihood or
// divergence is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// SVD non-convergence, rank deficiency and similar numerical failures.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A clustering step lost a whole cluster (empty layer cluster, empty half).
class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

}  // namespace mixclust
