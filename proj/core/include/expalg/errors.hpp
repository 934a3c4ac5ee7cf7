#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace expalg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iteration hit its cap or diverged. `worst_residual` is the best
/// (smallest) residual the iteration managed, or the worst one across a
/// batch, depending on the raising operation.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double worst_residual)
      : Error(what), worst_residual_(worst_residual) {}
  double worst_residual() const noexcept { return worst_residual_; }

 private:
  double worst_residual_;
};

/// Adaptive step control underflowed during path tracking: a discriminant
/// zero is likely on or very close to the path.
class BranchPointOnPath : public Error {
 public:
  using Error::Error;
};

class PoleAtLatticePoint : public Error {
 public:
  using Error::Error;
};

class Overflow : public Error {
 public:
  using Error::Error;
};

/// The fiber over a point is not a set of simple, finite points.
class DegenerateFiber : public Error {
 public:
  using Error::Error;
};

/// A path or iterate left the sector domain.
class LeftDomain : public Error {
 public:
  using Error::Error;
};

class ZeroOnBoundary : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace expalg
