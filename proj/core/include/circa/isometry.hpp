#ifndef CIRCA_ISOMETRY_HPP
#define CIRCA_ISOMETRY_HPP

#include <optional>
#include <span>
#include <vector>

#include "circa/numerics.hpp"
#include "circa/subspace.hpp"

namespace circa {

/// General affine operator x -> A x + b.
class AffineMap {
 public:
  AffineMap(Matrix linear, Vector offset);
  /// Linear map x -> A x.
  explicit AffineMap(Matrix linear);

  static AffineMap identity(Eigen::Index n);
  /// Projector onto an affine subspace.
  static AffineMap projector(const AffineSubspace& s);

  Eigen::Index dim() const noexcept { return offset_.size(); }
  const Matrix& linear() const noexcept { return linear_; }
  const Vector& offset() const noexcept { return offset_; }

  Vector apply(const Vector& x) const;
  Vector operator()(const Vector& x) const { return apply(x); }

  bool is_linear(const Tolerance& tol = {}) const;
  bool is_self_adjoint(const Tolerance& tol = {}) const;
  bool is_normal(const Tolerance& tol = {}) const;

 private:
  Matrix linear_;
  Vector offset_;
};

/// x -> second(first(x)).
AffineMap compose(const AffineMap& second, const AffineMap& first);

/// Affine isometry x -> Q x + b with Q orthogonal.
///
/// Instances can only be obtained from the factories below, all of which
/// check ||Q^T Q - I||_max <= 1e-10, so an AffineIsometry is always distance
/// preserving.
class AffineIsometry {
 public:
  static AffineIsometry identity(Eigen::Index n);
  /// Throws PreconditionViolation when Q is not orthogonal.
  static AffineIsometry orthogonal(Matrix q, Vector offset);
  static AffineIsometry orthogonal(Matrix q);

  Eigen::Index dim() const noexcept { return offset_.size(); }
  const Matrix& linear() const noexcept { return q_; }
  const Vector& offset() const noexcept { return offset_; }

  Vector apply(const Vector& x) const { return q_ * x + offset_; }
  Vector operator()(const Vector& x) const { return apply(x); }

  bool is_linear(const Tolerance& tol = {}) const;
  /// Linear and Q symmetric: exactly the reflectors of linear subspaces.
  bool is_linear_reflector(const Tolerance& tol = {}) const;

  AffineMap as_map() const { return AffineMap(q_, offset_); }

 private:
  AffineIsometry(Matrix q, Vector offset);

  Matrix q_;
  Vector offset_;
};

/// R_S = 2 P_S - Id.
AffineIsometry make_reflector(const AffineSubspace& s);

/// T_a x = x + a.
AffineIsometry make_translation(const Vector& a);

/// x -> second(first(x)); Q = Q2 Q1, b = Q2 b1 + b2.
AffineIsometry compose(const AffineIsometry& second, const AffineIsometry& first);

/// Product ops.back() * ... * ops.front() (first element applied first).
/// Identity of dimension n for an empty list.
AffineIsometry compose_all(std::span<const AffineIsometry> ops, Eigen::Index n);

/// Fix T: solves (Q - I) x = -b. Absent when the system is inconsistent.
std::optional<AffineSubspace> fixed_point_set(const AffineIsometry& t, const Tolerance& tol = {});
std::optional<AffineSubspace> fixed_point_set(const AffineMap& t, const Tolerance& tol = {});

/// F x = T(x + z) - z for a fixed point z of T.
AffineIsometry linearize_about(const AffineIsometry& t, const Vector& z,
                               const Tolerance& tol = {});

/// Weights, averaging constants and (product form only) relaxation
/// constants of an averaged combination of linear isometries.
struct AveragedSpec {
  std::vector<double> weights;
  std::vector<double> alphas;
  /// Used by the product form for i >= 2 (index 0 is ignored there).
  std::vector<double> lambdas;

  /// Uniform weights 1/t, all alphas and lambdas equal to 1/2.
  static AveragedSpec uniform(std::size_t t);

  void validate(std::size_t t, bool product_form) const;
};

/// Averaged linear operator with its averagedness constant alpha.
struct AveragedMap {
  AffineMap map;
  double alpha = 0.0;
};

/// A = sum_i w_i ((1 - a_i) I + a_i F_i).
AveragedMap build_sum_averaged(const AveragedSpec& spec, std::span<const AffineIsometry> fs,
                               const Tolerance& tol = {});

/// A = sum_i w_i A_i with A_1 = (1 - a_1) I + a_1 F_1 and, for i >= 2,
/// A_i = (1 - a_i) I + a_i ((1 - l_i) I + l_i F_i) F_{i-1} ... F_1.
AveragedMap build_product_averaged(const AveragedSpec& spec, std::span<const AffineIsometry> fs,
                                   const Tolerance& tol = {});

/// The accelerated mapping of a linear nonexpansive operator T:
/// x -> t_x T x + (1 - t_x) x with t_x = <x, x - Tx> / ||x - Tx||^2, and
/// x -> x when Tx == x (round-off threshold relative to 1 + ||x||).
class AcceleratedMap {
 public:
  /// Throws PreconditionViolation if T is not linear or ||T|| > 1 + eq_tol.
  AcceleratedMap(AffineMap t, const Tolerance& tol = {});

  const AffineMap& base() const noexcept { return t_; }
  Vector apply(const Vector& x) const;
  Vector operator()(const Vector& x) const { return apply(x); }

 private:
  AffineMap t_;
  Tolerance tol_;
};

/// One-shot form of AcceleratedMap (validates T on every call).
Vector accelerated_apply(const AffineMap& t, const Vector& x, const Tolerance& tol = {});

}  // namespace circa

#endif  // CIRCA_ISOMETRY_HPP
