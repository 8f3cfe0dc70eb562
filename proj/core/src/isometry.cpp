#include "circa/isometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
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

constexpr double kOrthogonalityTol = 1e-10;

// Tx == x test of the accelerated mapping. The step t_x stays bounded for
// any gap above round-off, so the branch only guards the division.
constexpr double kFixedPointFloor = 256.0 * std::numeric_limits<double>::epsilon();

std::optional<AffineSubspace> solve_fixed_points(const Matrix& a, const Vector& b,
                                                 const Tolerance& tol) {
  const Eigen::Index n = b.size();
  const Matrix shifted = a - Matrix::Identity(n, n);
  // A - I is measured against I: when A == I up to round-off it is all noise.
  const double cutoff = tol.rank_tol * std::max(1.0, a.norm());
  const LeastSquaresSolution ls = min_norm_solve(shifted, -b, tol, cutoff);
  if (ls.residual_norm > tol.consistency_tol * (1.0 + b.norm())) return std::nullopt;
  return AffineSubspace(ls.solution, null_space(shifted, tol, cutoff));
}

void require_linear_family(std::span<const AffineIsometry> fs, const Tolerance& tol,
                           const char* where) {
  if (fs.empty()) throw PreconditionViolation(std::string(where) + ": empty operator list");
  const Eigen::Index n = fs.front().dim();
  for (const auto& f : fs) {
    require_dim(n, f.dim(), where);
    if (!f.is_linear(tol)) {
      throw PreconditionViolation(std::string(where) + ": operators must be linear");
    }
  }
}

}  // namespace

// ---- AffineMap -------------------------------------------------------------

AffineMap::AffineMap(Matrix linear, Vector offset)
    : linear_(std::move(linear)), offset_(std::move(offset)) {
  if (linear_.rows() != linear_.cols()) {
    throw DimensionMismatch("AffineMap: linear part must be square");
  }
  require_dim(linear_.rows(), offset_.size(), "AffineMap");
  if (!all_finite(linear_) || !all_finite(offset_)) {
    throw PreconditionViolation("AffineMap: non-finite entries");
  }
}

AffineMap::AffineMap(Matrix linear)
    : AffineMap(linear, Vector::Zero(linear.rows())) {}

AffineMap AffineMap::identity(Eigen::Index n) { return AffineMap(Matrix::Identity(n, n)); }

AffineMap AffineMap::projector(const AffineSubspace& s) {
  const Matrix p = s.direction_projector();
  const Eigen::Index n = s.ambient_dim();
  return AffineMap(p, (Matrix::Identity(n, n) - p) * s.anchor());
}

Vector AffineMap::apply(const Vector& x) const {
  require_dim(dim(), x.size(), "AffineMap::apply");
  return linear_ * x + offset_;
}

bool AffineMap::is_linear(const Tolerance& tol) const { return offset_.norm() <= tol.eq_tol; }

bool AffineMap::is_self_adjoint(const Tolerance& tol) const {
  return max_abs(linear_ - linear_.transpose()) <= tol.eq_tol;
}

bool AffineMap::is_normal(const Tolerance& tol) const {
  return max_abs(linear_ * linear_.transpose() - linear_.transpose() * linear_) <= tol.eq_tol;
}

AffineMap compose(const AffineMap& second, const AffineMap& first) {
  require_dim(second.dim(), first.dim(), "compose");
  return AffineMap(second.linear() * first.linear(),
                   second.linear() * first.offset() + second.offset());
}

// ---- AffineIsometry --------------------------------------------------------

AffineIsometry::AffineIsometry(Matrix q, Vector offset)
    : q_(std::move(q)), offset_(std::move(offset)) {
  if (q_.rows() != q_.cols()) throw DimensionMismatch("AffineIsometry: Q must be square");
  require_dim(q_.rows(), offset_.size(), "AffineIsometry");
  if (!all_finite(q_) || !all_finite(offset_)) {
    throw PreconditionViolation("AffineIsometry: non-finite entries");
  }
  const Eigen::Index n = q_.rows();
  if (max_abs(q_.transpose() * q_ - Matrix::Identity(n, n)) > kOrthogonalityTol) {
    throw PreconditionViolation("AffineIsometry: linear part is not orthogonal");
  }
}

AffineIsometry AffineIsometry::identity(Eigen::Index n) {
  return AffineIsometry(Matrix::Identity(n, n), Vector::Zero(n));
}

AffineIsometry AffineIsometry::orthogonal(Matrix q, Vector offset) {
  return AffineIsometry(std::move(q), std::move(offset));
}

AffineIsometry AffineIsometry::orthogonal(Matrix q) {
  const Eigen::Index n = q.rows();
  return AffineIsometry(std::move(q), Vector::Zero(n));
}

bool AffineIsometry::is_linear(const Tolerance& tol) const { return offset_.norm() <= tol.eq_tol; }

bool AffineIsometry::is_linear_reflector(const Tolerance& tol) const {
  return is_linear(tol) && max_abs(q_ - q_.transpose()) <= tol.eq_tol;
}

AffineIsometry make_reflector(const AffineSubspace& s) {
  const Eigen::Index n = s.ambient_dim();
  const Matrix q = 2.0 * s.direction_projector() - Matrix::Identity(n, n);
  // R x = 2(a + BB^T(x - a)) - x, so b = 2(I - BB^T) a = 2a for a canonical anchor.
  const Vector b = 2.0 * (s.anchor() - s.basis() * (s.basis().transpose() * s.anchor()));
  return AffineIsometry::orthogonal(q, b);
}

AffineIsometry make_translation(const Vector& a) {
  return AffineIsometry::orthogonal(Matrix::Identity(a.size(), a.size()), a);
}

AffineIsometry compose(const AffineIsometry& second, const AffineIsometry& first) {
  require_dim(second.dim(), first.dim(), "compose");
  return AffineIsometry::orthogonal(second.linear() * first.linear(),
                                    second.linear() * first.offset() + second.offset());
}

AffineIsometry compose_all(std::span<const AffineIsometry> ops, Eigen::Index n) {
  AffineIsometry out = AffineIsometry::identity(n);
  for (const auto& op : ops) out = compose(op, out);
  return out;
}

std::optional<AffineSubspace> fixed_point_set(const AffineIsometry& t, const Tolerance& tol) {
  return solve_fixed_points(t.linear(), t.offset(), tol);
}

std::optional<AffineSubspace> fixed_point_set(const AffineMap& t, const Tolerance& tol) {
  return solve_fixed_points(t.linear(), t.offset(), tol);
}

AffineIsometry linearize_about(const AffineIsometry& t, const Vector& z, const Tolerance& tol) {
  require_dim(t.dim(), z.size(), "linearize_about");
  if ((t.apply(z) - z).norm() > tol.consistency_tol * (1.0 + z.norm())) {
    throw PreconditionViolation("linearize_about: z is not a fixed point of T");
  }
  // F x = Q(x + z) + b - z = Q x + (Q z + b - z), and Q z + b - z = 0.
  return AffineIsometry::orthogonal(t.linear());
}

// ---- averaged operators ----------------------------------------------------

AveragedSpec AveragedSpec::uniform(std::size_t t) {
  AveragedSpec spec;
  spec.weights.assign(t, 1.0 / static_cast<double>(t));
  spec.alphas.assign(t, 0.5);
  spec.lambdas.assign(t, 0.5);
  return spec;
}

void AveragedSpec::validate(std::size_t t, bool product_form) const {
  if (weights.size() != t || alphas.size() != t || (product_form && lambdas.size() != t)) {
    throw PreconditionViolation("AveragedSpec: expected " + std::to_string(t) +
                                " weights/alphas" + (product_form ? "/lambdas" : ""));
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) {
    throw PreconditionViolation("AveragedSpec: weights must sum to 1");
  }
  for (double w : weights) {
    if (!(w > 0.0 && w <= 1.0)) throw PreconditionViolation("AveragedSpec: weight outside (0,1]");
  }
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw PreconditionViolation("AveragedSpec: alpha outside (0,1)");
  }
  if (product_form) {
    for (std::size_t i = 1; i < lambdas.size(); ++i) {
      if (!(lambdas[i] > 0.0 && lambdas[i] < 1.0)) {
        throw PreconditionViolation("AveragedSpec: lambda outside (0,1)");
      }
    }
  }
}

AveragedMap build_sum_averaged(const AveragedSpec& spec, std::span<const AffineIsometry> fs,
                               const Tolerance& tol) {
  require_linear_family(fs, tol, "build_sum_averaged");
  spec.validate(fs.size(), false);
  const Eigen::Index n = fs.front().dim();
  const Matrix id = Matrix::Identity(n, n);
  Matrix a = Matrix::Zero(n, n);
  double alpha = 0.0;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    a += spec.weights[i] * ((1.0 - spec.alphas[i]) * id + spec.alphas[i] * fs[i].linear());
    alpha += spec.weights[i] * spec.alphas[i];
  }
  return {AffineMap(a), alpha};
}

AveragedMap build_product_averaged(const AveragedSpec& spec, std::span<const AffineIsometry> fs,
                                   const Tolerance& tol) {
  require_linear_family(fs, tol, "build_product_averaged");
  spec.validate(fs.size(), true);
  const Eigen::Index n = fs.front().dim();
  const Matrix id = Matrix::Identity(n, n);
  Matrix a = spec.weights[0] * ((1.0 - spec.alphas[0]) * id + spec.alphas[0] * fs[0].linear());
  double alpha = spec.weights[0] * spec.alphas[0];
  Matrix prefix = fs[0].linear();  // F_{i-1} ... F_1
  for (std::size_t i = 1; i < fs.size(); ++i) {
    const double lam = spec.lambdas[i];
    const Matrix relaxed = (1.0 - lam) * id + lam * fs[i].linear();
    const Matrix ai = (1.0 - spec.alphas[i]) * id + spec.alphas[i] * relaxed * prefix;
    a += spec.weights[i] * ai;
    alpha += spec.weights[i] * spec.alphas[i];
    prefix = fs[i].linear() * prefix;
  }
  return {AffineMap(a), alpha};
}

// ---- accelerated mapping ---------------------------------------------------

AcceleratedMap::AcceleratedMap(AffineMap t, const Tolerance& tol) : t_(std::move(t)), tol_(tol) {
  if (!t_.is_linear(tol_)) throw PreconditionViolation("AcceleratedMap: T must be linear");
  if (spectral_norm(t_.linear()) > 1.0 + tol_.eq_tol) {
    throw PreconditionViolation("AcceleratedMap: T is expansive");
  }
}

Vector AcceleratedMap::apply(const Vector& x) const {
  const Vector tx = t_.linear() * x;
  const Vector diff = x - tx;
  const double gap = diff.norm();
  if (gap <= kFixedPointFloor * (1.0 + x.norm())) return x;
  const double step = x.dot(diff) / (gap * gap);
  return step * tx + (1.0 - step) * x;
}

Vector accelerated_apply(const AffineMap& t, const Vector& x, const Tolerance& tol) {
  return AcceleratedMap(t, tol).apply(x);
}

}  // namespace circa
