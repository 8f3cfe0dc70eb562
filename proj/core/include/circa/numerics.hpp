#ifndef CIRCA_NUMERICS_HPP
#define CIRCA_NUMERICS_HPP

// Dense small-matrix kernels shared by every other module. Matrices and
// vectors are plain Eigen dense types; the kernels themselves are thin,
// tolerance-aware wrappers around SVD and symmetric eigen solvers.

#include <span>
#include <utility>

#include <Eigen/Dense>

namespace circa {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Numerical thresholds threaded through every rank or membership decision.
struct Tolerance {
  /// Singular values at or below rank_tol * sigma_max count as zero.
  double rank_tol = 1e-10;
  /// Residual cutoff for "this system is consistent" / "x belongs to S",
  /// always applied relative to a problem scale (1 + norm).
  double consistency_tol = 1e-8;
  /// Pointwise equality (symmetry checks, deduplication).
  double eq_tol = 1e-10;

  void validate() const;
};

struct LeastSquaresSolution {
  Vector solution;
  double residual_norm = 0.0;
};

struct EigenExtremes {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

/// Orthonormal basis (as matrix columns) of the span of `columns`.
/// The number of returned columns is the numerical rank at tol.rank_tol.
Matrix orthonormal_basis(const Matrix& columns, const Tolerance& tol = {});

/// Same, for a list of vectors sharing one ambient dimension.
/// Throws DimensionMismatch if the dimensions differ.
Matrix orthonormal_basis(std::span<const Vector> vectors, const Tolerance& tol = {});

/// Orthonormal basis of ker(A), as columns of an A.cols() x k matrix.
/// Singular values at or below max(rank_tol * sigma_max, absolute_cutoff)
/// count as zero.
Matrix null_space(const Matrix& a, const Tolerance& tol = {}, double absolute_cutoff = 0.0);

/// Minimum-norm least-squares solution of A x = b (pseudoinverse route).
/// Singular values at or below max(rank_tol * sigma_max, absolute_cutoff)
/// are treated as zero.
LeastSquaresSolution min_norm_solve(const Matrix& a, const Vector& b,
                                    const Tolerance& tol = {}, double absolute_cutoff = 0.0);

/// Largest singular value of A, i.e. sqrt(lambda_max(A^T A)).
double spectral_norm(const Matrix& a);

/// Extreme eigenvalues of the symmetric part (M + M^T) / 2.
EigenExtremes sym_eigen_extremes(const Matrix& m);

/// max |A_ij|, 0 for an empty matrix.
double max_abs(const Matrix& a);

/// True when every entry is finite.
bool all_finite(const Matrix& a);

}  // namespace circa

#endif  // CIRCA_NUMERICS_HPP
