#include "circa/subspace.hpp"

#include <algorithm>
#include <string>

#include "circa/errors.hpp"

namespace circa {

namespace {

void require_dim(Eigen::Index expected, Eigen::Index got, const char* where) {
  if (expected != got) {
    throw DimensionMismatch(std::string(where) + ": dimension " + std::to_string(got) +
                            ", expected " + std::to_string(expected));
  }
}

// Orthonormal basis of the orthogonal complement of span(basis).
Matrix complement_basis(const Matrix& basis, Eigen::Index n, const Tolerance& tol) {
  if (basis.cols() == 0) return Matrix::Identity(n, n);
  return null_space(basis.transpose(), tol);
}

}  // namespace

AffineSubspace::AffineSubspace(Vector anchor, Matrix orthonormal_basis)
    : anchor_(std::move(anchor)), basis_(std::move(orthonormal_basis)) {
  if (basis_.cols() > 0) require_dim(anchor_.size(), basis_.rows(), "AffineSubspace");
  if (basis_.cols() == 0) basis_.resize(anchor_.size(), 0);
  if (!all_finite(anchor_) || !all_finite(basis_)) {
    throw PreconditionViolation("AffineSubspace: non-finite entries");
  }
  const Matrix gram = basis_.transpose() * basis_;
  if (max_abs(gram - Matrix::Identity(gram.rows(), gram.cols())) > 1e-10) {
    throw PreconditionViolation("AffineSubspace: basis is not orthonormal");
  }
  // Canonical anchor: nearest point of the set to the origin.
  anchor_ -= basis_ * (basis_.transpose() * anchor_);
}

AffineSubspace AffineSubspace::from_span(const Vector& anchor, const Matrix& span,
                                         const Tolerance& tol) {
  if (span.cols() > 0) require_dim(anchor.size(), span.rows(), "AffineSubspace::from_span");
  Matrix basis = span.cols() > 0 ? orthonormal_basis(span, tol) : Matrix(anchor.size(), 0);
  return AffineSubspace(anchor, std::move(basis));
}

AffineSubspace AffineSubspace::from_span(const Vector& anchor, std::span<const Vector> span,
                                         const Tolerance& tol) {
  Matrix cols(anchor.size(), static_cast<Eigen::Index>(span.size()));
  for (std::size_t j = 0; j < span.size(); ++j) {
    require_dim(anchor.size(), span[j].size(), "AffineSubspace::from_span");
    cols.col(static_cast<Eigen::Index>(j)) = span[j];
  }
  return from_span(anchor, cols, tol);
}

AffineSubspace AffineSubspace::linear_span(const Matrix& span, const Tolerance& tol) {
  return from_span(Vector::Zero(span.rows()), span, tol);
}

AffineSubspace AffineSubspace::point(const Vector& p) { return AffineSubspace(p, Matrix(p.size(), 0)); }

AffineSubspace AffineSubspace::whole(Eigen::Index n) {
  return AffineSubspace(Vector::Zero(n), Matrix::Identity(n, n));
}

AffineSubspace AffineSubspace::zero(Eigen::Index n) { return point(Vector::Zero(n)); }

bool AffineSubspace::is_linear(const Tolerance& tol) const {
  return anchor_.norm() <= tol.consistency_tol;
}

Matrix AffineSubspace::direction_projector() const { return basis_ * basis_.transpose(); }

Vector AffineSubspace::project(const Vector& x) const {
  require_dim(ambient_dim(), x.size(), "project");
  const Vector shifted = x - anchor_;
  return anchor_ + basis_ * (basis_.transpose() * shifted);
}

Vector AffineSubspace::reflect(const Vector& x) const { return 2.0 * project(x) - x; }

bool AffineSubspace::contains(const Vector& x, const Tolerance& tol) const {
  return (project(x) - x).norm() <= tol.consistency_tol * (1.0 + x.norm());
}

double AffineSubspace::distance(const Vector& x) const { return (project(x) - x).norm(); }

AffineSubspace orthogonal_complement(const AffineSubspace& s, const Tolerance& tol) {
  if (!s.is_linear(tol)) {
    throw PreconditionViolation("orthogonal_complement: subspace does not contain the origin");
  }
  const Eigen::Index n = s.ambient_dim();
  return AffineSubspace(Vector::Zero(n), complement_basis(s.basis(), n, tol));
}

IntersectionResult intersect(std::span<const AffineSubspace> subspaces, const Tolerance& tol) {
  if (subspaces.empty()) throw PreconditionViolation("intersect: empty list");
  const Eigen::Index n = subspaces.front().ambient_dim();
  const auto m = static_cast<Eigen::Index>(subspaces.size());

  // x belongs to D_j = a_j + span(B_j) iff (I - B_j B_j^T)(x - a_j) = 0.
  Matrix stacked(m * n, n);
  Vector rhs(m * n);
  double scale = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    const AffineSubspace& s = subspaces[static_cast<std::size_t>(j)];
    require_dim(n, s.ambient_dim(), "intersect");
    const Matrix normal = Matrix::Identity(n, n) - s.direction_projector();
    stacked.middleRows(j * n, n) = normal;
    rhs.segment(j * n, n) = normal * s.anchor();
    scale = std::max(scale, s.anchor().norm());
  }

  // The normals are projectors, so singular values are measured against 1.
  const LeastSquaresSolution ls = min_norm_solve(stacked, rhs, tol, tol.rank_tol);
  IntersectionResult out;
  out.residual = ls.residual_norm;
  if (ls.residual_norm > tol.consistency_tol * (1.0 + scale)) return out;
  out.subspace = AffineSubspace(ls.solution, null_space(stacked, tol, tol.rank_tol));
  return out;
}

AffineSubspace intersect_or_throw(std::span<const AffineSubspace> subspaces,
                                  const Tolerance& tol) {
  IntersectionResult r = intersect(subspaces, tol);
  if (!r) {
    throw EmptyIntersection("subspaces have empty intersection (residual " +
                                std::to_string(r.residual) + ")",
                            r.residual);
  }
  return *std::move(r.subspace);
}

AffineSubspace linear_sum(std::span<const AffineSubspace> subspaces, const Tolerance& tol) {
  if (subspaces.empty()) throw PreconditionViolation("linear_sum: empty list");
  const Eigen::Index n = subspaces.front().ambient_dim();
  Eigen::Index total = 0;
  for (const auto& s : subspaces) {
    require_dim(n, s.ambient_dim(), "linear_sum");
    if (!s.is_linear(tol)) throw PreconditionViolation("linear_sum: nonlinear subspace");
    total += s.dim();
  }
  Matrix cols(n, total);
  Eigen::Index at = 0;
  for (const auto& s : subspaces) {
    cols.middleCols(at, s.dim()) = s.basis();
    at += s.dim();
  }
  return AffineSubspace::linear_span(cols, tol);
}

bool same_set(const AffineSubspace& a, const AffineSubspace& b, const Tolerance& tol) {
  if (a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim()) return false;
  const double scale = 1.0 + std::max(a.anchor().norm(), b.anchor().norm());
  if (max_abs(a.direction_projector() - b.direction_projector()) > tol.consistency_tol) {
    return false;
  }
  return (a.anchor() - b.anchor()).norm() <= tol.consistency_tol * scale;
}

}  // namespace circa
