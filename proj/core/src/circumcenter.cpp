#include "circa/circumcenter.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "circa/errors.hpp"

namespace circa {

namespace {

// Relative size of the noise carried by computed operator images.
constexpr double kRoundoff = 1024.0 * std::numeric_limits<double>::epsilon();
// Differences below this lose digits to gradual underflow.
constexpr double kUnderflow = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();

bool same_operator(const AffineIsometry& a, const AffineIsometry& b, double eq_tol) {
  return max_abs(a.linear() - b.linear()) <= eq_tol && (a.offset() - b.offset()).norm() <= eq_tol;
}

bool is_identity(const AffineIsometry& t, double eq_tol) {
  return same_operator(t, AffineIsometry::identity(t.dim()), eq_tol);
}

AffineSubspace common_fixed_set_of(const std::vector<AffineIsometry>& ops, const Tolerance& tol) {
  std::vector<AffineSubspace> fixed;
  fixed.reserve(ops.size());
  for (std::size_t i = 0; i < ops.size(); ++i) {
    auto f = fixed_point_set(ops[i], tol);
    if (!f) {
      throw EmptyIntersection("operator " + std::to_string(i) + " has no fixed point", 0.0);
    }
    fixed.push_back(*std::move(f));
  }
  return intersect_or_throw(fixed, tol);
}

std::string reflector_product_label(const std::vector<std::size_t>& indices) {
  if (indices.empty()) return "Id";
  std::string label;
  for (auto it = indices.rbegin(); it != indices.rend(); ++it) label += "R" + std::to_string(*it + 1);
  return label;
}

}  // namespace

CircumcenterResult circumcenter(std::span<const Vector> points, const Tolerance& tol) {
  if (points.empty()) throw PreconditionViolation("circumcenter: empty point set");
  const Eigen::Index n = points.front().size();
  const Vector& p0 = points.front();

  double max_norm = 0.0;
  double extent = 0.0;
  for (const auto& p : points) {
    if (p.size() != n) throw DimensionMismatch("circumcenter: points differ in dimension");
    max_norm = std::max(max_norm, p.stableNorm());
    extent = std::max(extent, (p - p0).stableNorm());
  }
  const double noise = kRoundoff * max_norm + kUnderflow;
  const double merge_radius = std::max(tol.eq_tol * extent, noise);

  // Distinct points other than p_0, remembering where each came from.
  std::vector<Eigen::Index> source;
  std::vector<Vector> distinct{p0};
  for (std::size_t i = 1; i < points.size(); ++i) {
    const bool seen = std::any_of(distinct.begin(), distinct.end(), [&](const Vector& q) {
      return (points[i] - q).stableNorm() <= merge_radius;
    });
    if (!seen) {
      distinct.push_back(points[i]);
      source.push_back(static_cast<Eigen::Index>(i) - 1);
    }
  }

  CircumcenterResult out;
  out.scale = 2.0 * extent;
  out.coefficients = Vector::Zero(static_cast<Eigen::Index>(points.size()) - 1);
  if (distinct.size() == 1) {
    out.center = p0;
    return out;
  }

  // Directions are divided by the extent so that squared norms cannot
  // underflow or overflow.
  const auto k = static_cast<Eigen::Index>(distinct.size()) - 1;
  Matrix directions(n, k);
  Vector half_sq(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    directions.col(i) = (distinct[static_cast<std::size_t>(i) + 1] - p0) / extent;
    half_sq(i) = 0.5 * directions.col(i).squaredNorm();
  }
  const double unit_noise = noise / extent;

  // ||c - p_i|| = ||c - p_0|| for all i  <=>  <c - p_0, d_i> = ||d_i||^2 / 2.
  // The minimum-norm solution lies in span{d_i}, i.e. c stays in aff K.
  const Vector unit_offset = min_norm_solve(directions.transpose(), half_sq, tol, unit_noise).solution;
  const Vector candidate = p0 + extent * unit_offset;

  const LeastSquaresSolution coords = min_norm_solve(directions, unit_offset, tol, unit_noise);
  for (Eigen::Index i = 0; i < k; ++i) out.coefficients(source[static_cast<std::size_t>(i)]) = coords.solution(i);
  // Distance of the candidate from aff K. Measured through an orthonormal
  // basis: the coefficients above may cancel heavily.
  const Matrix q = orthonormal_basis(directions, tol);
  out.hull_residual = extent * (unit_offset - q * (q.transpose() * unit_offset)).stableNorm();

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& p : points) {
    const double r = (candidate - p).stableNorm();
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  out.equidistance_spread = hi - lo;

  const double allowed = tol.consistency_tol * out.scale + 4.0 * noise;
  if (out.equidistance_spread <= allowed && out.hull_residual <= allowed) out.center = candidate;
  return out;
}

// ---- OperatorSet -----------------------------------------------------------

OperatorSet::OperatorSet(std::vector<AffineIsometry> ops, std::vector<std::string> labels,
                         const Tolerance& tol)
    : ops_(std::move(ops)),
      labels_(std::move(labels)),
      common_fixed_(AffineSubspace::zero(0)),
      tol_(tol) {
  if (ops_.empty()) throw PreconditionViolation("OperatorSet: empty operator list");
  dim_ = ops_.front().dim();
  for (const auto& op : ops_) {
    if (op.dim() != dim_) throw DimensionMismatch("OperatorSet: operators differ in dimension");
  }
  if (labels_.empty()) {
    for (std::size_t i = 0; i < ops_.size(); ++i) labels_.push_back("T" + std::to_string(i + 1));
  } else if (labels_.size() != ops_.size()) {
    throw PreconditionViolation("OperatorSet: label count does not match operator count");
  }
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const bool duplicate = std::any_of(distinct_.begin(), distinct_.end(), [&](std::size_t j) {
      return same_operator(ops_[i], ops_[j], tol_.eq_tol);
    });
    if (!duplicate) distinct_.push_back(i);
    contains_identity_ = contains_identity_ || is_identity(ops_[i], tol_.eq_tol);
  }
  common_fixed_ = common_fixed_set_of(ops_, tol_);
}

std::vector<Vector> OperatorSet::images(const Vector& x) const {
  if (x.size() != dim_) throw DimensionMismatch("OperatorSet::images: dimension mismatch");
  std::vector<Vector> out;
  out.reserve(distinct_.size());
  for (std::size_t i : distinct_) out.push_back(ops_[i].apply(x));
  return out;
}

Vector circumcenter_map(const OperatorSet& s, const Vector& x) {
  const std::vector<Vector> pts = s.images(x);
  CircumcenterResult r = circumcenter(pts, s.tolerance());
  if (!r.center) {
    throw NumericalProperness("circumcenter_map: no circumcenter within tolerance (spread " +
                                  std::to_string(r.equidistance_spread) + ")",
                              r.equidistance_spread, r.hull_residual);
  }
  return *std::move(r.center);
}

OperatorSet shift_operator_set(const OperatorSet& s, const Vector& z) {
  const Tolerance& tol = s.tolerance();
  if (!s.common_fixed_set().contains(z, tol)) {
    throw PreconditionViolation("shift_operator_set: z is not a common fixed point");
  }
  std::vector<AffineIsometry> shifted;
  shifted.reserve(s.size());
  for (const auto& op : s.ops()) shifted.push_back(linearize_about(op, z, tol));
  return OperatorSet(std::move(shifted), s.labels(), tol);
}

OperatorSet build_psi(std::span<const AffineIsometry> reflectors, const Tolerance& tol) {
  if (reflectors.empty()) throw PreconditionViolation("build_psi: no reflectors");
  if (reflectors.size() > kMaxPsiReflectors) {
    throw PreconditionViolation("build_psi: at most " + std::to_string(kMaxPsiReflectors) +
                                " reflectors supported");
  }
  const Eigen::Index n = reflectors.front().dim();
  for (const auto& r : reflectors) {
    if (r.dim() != n) throw DimensionMismatch("build_psi: reflectors differ in dimension");
    if (!r.is_linear_reflector(tol)) {
      throw PreconditionViolation("build_psi: input is not a reflector of a linear subspace");
    }
  }

  const std::size_t m = reflectors.size();
  std::vector<AffineIsometry> ops;
  std::vector<std::string> labels;
  ops.reserve(std::size_t{1} << m);
  for (std::size_t len = 0; len <= m; ++len) {
    // Strictly increasing index tuples of length `len`, lexicographic.
    std::vector<std::size_t> idx(len);
    for (std::size_t i = 0; i < len; ++i) idx[i] = i;
    while (true) {
      AffineIsometry product = AffineIsometry::identity(n);
      for (std::size_t i : idx) product = compose(reflectors[i], product);
      ops.push_back(std::move(product));
      labels.push_back(reflector_product_label(idx));

      std::size_t pos = len;
      while (pos > 0 && idx[pos - 1] == m - len + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t i = pos; i < len; ++i) idx[i] = idx[i - 1] + 1;
    }
  }
  return OperatorSet(std::move(ops), std::move(labels), tol);
}

OperatorSet identity_plus(std::span<const AffineIsometry> ops, const Tolerance& tol) {
  if (ops.empty()) throw PreconditionViolation("identity_plus: no operators");
  std::vector<AffineIsometry> all{AffineIsometry::identity(ops.front().dim())};
  std::vector<std::string> labels{"Id"};
  for (std::size_t i = 0; i < ops.size(); ++i) {
    all.push_back(ops[i]);
    labels.push_back("T" + std::to_string(i + 1));
  }
  return OperatorSet(std::move(all), std::move(labels), tol);
}

OperatorSet identity_plus_prefix_products(std::span<const AffineIsometry> ops,
                                          const Tolerance& tol) {
  if (ops.empty()) throw PreconditionViolation("identity_plus_prefix_products: no operators");
  std::vector<AffineIsometry> all{AffineIsometry::identity(ops.front().dim())};
  std::vector<std::string> labels{"Id"};
  std::string label;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (ops[i].dim() != ops.front().dim()) {
      throw DimensionMismatch("identity_plus_prefix_products: operators differ in dimension");
    }
    all.push_back(compose(ops[i], all.back()));
    label = "T" + std::to_string(i + 1) + label;
    labels.push_back(label);
  }
  return OperatorSet(std::move(all), std::move(labels), tol);
}

}  // namespace circa
