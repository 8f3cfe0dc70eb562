#include "circa/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "circa/errors.hpp"

namespace circa {

namespace {

// Numerical rank from a descending list of singular values.
Eigen::Index numerical_rank(const Vector& singular_values, double rank_tol,
                            double absolute_cutoff = 0.0) {
  if (singular_values.size() == 0) return 0;
  const double top = singular_values(0);
  if (!(top > 0.0)) return 0;
  const double cutoff = std::max(rank_tol * top, absolute_cutoff);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < singular_values.size(); ++i) {
    if (singular_values(i) > cutoff) ++r;
  }
  return r;
}

}  // namespace

void Tolerance::validate() const {
  if (!(rank_tol >= 0.0) || !(consistency_tol >= 0.0) || !(eq_tol >= 0.0)) {
    throw PreconditionViolation("tolerances must be nonnegative");
  }
}

Matrix orthonormal_basis(const Matrix& columns, const Tolerance& tol) {
  if (columns.cols() == 0 || columns.rows() == 0) return Matrix(columns.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(columns, Eigen::ComputeThinU);
  const Eigen::Index r = numerical_rank(svd.singularValues(), tol.rank_tol);
  return svd.matrixU().leftCols(r);
}

Matrix orthonormal_basis(std::span<const Vector> vectors, const Tolerance& tol) {
  if (vectors.empty()) return Matrix(0, 0);
  const Eigen::Index n = vectors.front().size();
  Matrix stacked(n, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != n) {
      throw DimensionMismatch("orthonormal_basis: vector " + std::to_string(j) +
                              " has dimension " + std::to_string(vectors[j].size()) +
                              ", expected " + std::to_string(n));
    }
    stacked.col(static_cast<Eigen::Index>(j)) = vectors[j];
  }
  return orthonormal_basis(stacked, tol);
}

Matrix null_space(const Matrix& a, const Tolerance& tol, double absolute_cutoff) {
  const Eigen::Index n = a.cols();
  if (n == 0) return Matrix(0, 0);
  if (a.rows() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const Eigen::Index r = numerical_rank(svd.singularValues(), tol.rank_tol, absolute_cutoff);
  return svd.matrixV().rightCols(n - r);
}

LeastSquaresSolution min_norm_solve(const Matrix& a, const Vector& b, const Tolerance& tol,
                                    double absolute_cutoff) {
  if (a.rows() != b.size()) {
    throw DimensionMismatch("min_norm_solve: A has " + std::to_string(a.rows()) +
                            " rows but b has dimension " + std::to_string(b.size()));
  }
  LeastSquaresSolution out;
  if (a.cols() == 0 || a.rows() == 0) {
    out.solution = Vector::Zero(a.cols());
    out.residual_norm = b.norm();
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const Eigen::Index r = numerical_rank(s, tol.rank_tol, absolute_cutoff);
  // x = V_r S_r^{-1} U_r^T b
  Vector coeffs = svd.matrixU().leftCols(r).transpose() * b;
  for (Eigen::Index i = 0; i < r; ++i) coeffs(i) /= s(i);
  out.solution = svd.matrixV().leftCols(r) * coeffs;
  out.residual_norm = (a * out.solution - b).norm();
  return out;
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) throw PreconditionViolation("spectral_norm: empty matrix");
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

EigenExtremes sym_eigen_extremes(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("sym_eigen_extremes: matrix is " + std::to_string(m.rows()) +
                            "x" + std::to_string(m.cols()) + ", expected square");
  }
  if (m.size() == 0) return {};
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();  // ascending
  return {ev(0), ev(ev.size() - 1)};
}

double max_abs(const Matrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

bool all_finite(const Matrix& a) { return a.allFinite(); }

}  // namespace circa
