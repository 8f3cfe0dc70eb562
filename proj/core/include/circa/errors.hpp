#ifndef CIRCA_ERRORS_HPP
#define CIRCA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace circa {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live in different ambient spaces, or a matrix has the wrong shape.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its documented domain (nonlinear input
/// where a linear one is required, expansive operator, bad weights, ...).
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

/// A set of affine subspaces or fixed-point sets has no common point.
class EmptyIntersection : public Error {
 public:
  EmptyIntersection(const std::string& what, double residual)
      : Error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// The circumcenter of an isometry-induced point set was not found within
/// tolerance. Mathematically it always exists, so this signals ill-conditioning.
class NumericalProperness : public Error {
 public:
  NumericalProperness(const std::string& what, double spread, double hull_residual)
      : Error(what), spread_(spread), hull_residual_(hull_residual) {}

  double spread() const noexcept { return spread_; }
  double hull_residual() const noexcept { return hull_residual_; }

 private:
  double spread_;
  double hull_residual_;
};

}  // namespace circa

#endif  // CIRCA_ERRORS_HPP
