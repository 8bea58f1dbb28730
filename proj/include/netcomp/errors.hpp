#pragma once

#include <stdexcept>
#include <string>

namespace netcomp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file or CSV/JSON row.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input parsed but violates a domain invariant (negative entry, self-loop, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An iterative method did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A linear system required by the affine wealth representation is singular.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

}  // namespace netcomp
