#ifndef CIRCA_SUBSPACE_HPP
#define CIRCA_SUBSPACE_HPP

#include <optional>
#include <span>
#include <vector>

#include "circa/numerics.hpp"

namespace circa {

/// Affine subspace anchor + span(basis) of R^n.
///
/// The basis is stored as orthonormal columns. The anchor is kept in
/// canonical form: the point of the set closest to the origin, so the set
/// is linear exactly when the anchor vanishes.
class AffineSubspace {
 public:
  /// Build from an arbitrary point of the set and raw (not necessarily
  /// independent or orthonormal) spanning vectors given as columns.
  static AffineSubspace from_span(const Vector& anchor, const Matrix& span,
                                  const Tolerance& tol = {});
  static AffineSubspace from_span(const Vector& anchor, std::span<const Vector> span,
                                  const Tolerance& tol = {});

  /// Linear subspace spanned by the columns of `span`.
  static AffineSubspace linear_span(const Matrix& span, const Tolerance& tol = {});
  static AffineSubspace point(const Vector& p);
  static AffineSubspace whole(Eigen::Index n);
  static AffineSubspace zero(Eigen::Index n);

  /// Trusted constructor: `orthonormal_basis` must already have orthonormal
  /// columns (checked to 1e-10).
  AffineSubspace(Vector anchor, Matrix orthonormal_basis);

  Eigen::Index ambient_dim() const noexcept { return anchor_.size(); }
  Eigen::Index dim() const noexcept { return basis_.cols(); }
  const Vector& anchor() const noexcept { return anchor_; }
  const Matrix& basis() const noexcept { return basis_; }

  /// True when the set contains the origin (within tol.consistency_tol).
  bool is_linear(const Tolerance& tol = {}) const;

  /// B B^T, the projector onto the direction space.
  Matrix direction_projector() const;

  Vector project(const Vector& x) const;
  Vector reflect(const Vector& x) const;

  /// ||P x - x|| <= consistency_tol * (1 + ||x||).
  bool contains(const Vector& x, const Tolerance& tol = {}) const;

  /// Distance from x to the set.
  double distance(const Vector& x) const;

 private:
  Vector anchor_;
  Matrix basis_;
};

struct IntersectionResult {
  /// Absent when the subspaces have no common point.
  std::optional<AffineSubspace> subspace;
  /// Least-squares residual of the stacked membership constraints.
  double residual = 0.0;

  explicit operator bool() const noexcept { return subspace.has_value(); }
};

/// Orthogonal complement of a linear subspace. Throws PreconditionViolation
/// when `s` does not contain the origin.
AffineSubspace orthogonal_complement(const AffineSubspace& s, const Tolerance& tol = {});

/// Affine intersection of a nonempty list of subspaces of one ambient space.
IntersectionResult intersect(std::span<const AffineSubspace> subspaces,
                             const Tolerance& tol = {});

/// Like intersect() but throws EmptyIntersection instead of returning empty.
AffineSubspace intersect_or_throw(std::span<const AffineSubspace> subspaces,
                                  const Tolerance& tol = {});

/// Sum U + V of linear subspaces.
AffineSubspace linear_sum(std::span<const AffineSubspace> subspaces,
                          const Tolerance& tol = {});

/// Set equality: same dimension, same direction projector, anchors of one
/// contained in the other.
bool same_set(const AffineSubspace& a, const AffineSubspace& b, const Tolerance& tol = {});

}  // namespace circa

#endif  // CIRCA_SUBSPACE_HPP
