#pragma once

#include <stdexcept>
#include <string>

namespace pnpns {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fields on incompatible grids, wrong array sizes, odd refinement.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation was violated.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain (e.g. log of a nonpositive value).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver hit its budget; carries the last residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// NaN or breakdown inside an iterative solver.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pnpns
