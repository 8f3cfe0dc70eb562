#ifndef CIRCA_CIRCUMCENTER_HPP
#define CIRCA_CIRCUMCENTER_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "circa/isometry.hpp"
#include "circa/numerics.hpp"
#include "circa/subspace.hpp"

namespace circa {

struct CircumcenterResult {
  /// The point of aff K equidistant from every point of K, if it exists.
  std::optional<Vector> center;
  /// Pseudoinverse coordinates of center - p_0 in the directions p_i - p_0
  /// (one entry per input point after the first; zero for duplicates).
  Vector coefficients;
  /// max_i ||c - p_i|| - min_i ||c - p_i|| at the candidate point.
  double equidistance_spread = 0.0;
  /// Distance of the candidate point from aff K.
  double hull_residual = 0.0;
  /// Diameter of K (upper estimate within a factor 2).
  double scale = 0.0;
};

/// Circumcenter of a finite nonempty point set.
///
/// Points closer than round-off (or eq_tol relative to the set's extent) are
/// merged first. The center is the minimum-norm solution y of
/// <y, p_i - p_0> = ||p_i - p_0||^2 / 2, shifted by p_0; it exists when the
/// resulting spread is at most consistency_tol times the set's extent.
CircumcenterResult circumcenter(std::span<const Vector> points, const Tolerance& tol = {});

/// Ordered finite set S of affine isometries with a common fixed point.
class OperatorSet {
 public:
  /// Throws EmptyIntersection when the operators share no fixed point and
  /// PreconditionViolation for an empty list or mismatched dimensions.
  explicit OperatorSet(std::vector<AffineIsometry> ops, std::vector<std::string> labels = {},
                       const Tolerance& tol = {});

  Eigen::Index dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return ops_.size(); }
  const std::vector<AffineIsometry>& ops() const noexcept { return ops_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  bool contains_identity() const noexcept { return contains_identity_; }
  /// Intersection of the fixed-point sets of all operators.
  const AffineSubspace& common_fixed_set() const noexcept { return common_fixed_; }
  const Tolerance& tolerance() const noexcept { return tol_; }

  /// S(x) = {T x : T in S}, with structurally equal operators evaluated once.
  std::vector<Vector> images(const Vector& x) const;

 private:
  std::vector<AffineIsometry> ops_;
  std::vector<std::string> labels_;
  std::vector<std::size_t> distinct_;
  Eigen::Index dim_ = 0;
  bool contains_identity_ = false;
  AffineSubspace common_fixed_;
  Tolerance tol_;
};

/// C_S x = circumcenter of S(x). Throws NumericalProperness when no center
/// is found within tolerance.
Vector circumcenter_map(const OperatorSet& s, const Vector& x);

/// The operator set {F_i : F_i x = T_i(x + z) - z} for a common fixed point z.
OperatorSet shift_operator_set(const OperatorSet& s, const Vector& z);

/// Maximum number of reflectors accepted by build_psi.
inline constexpr std::size_t kMaxPsiReflectors = 16;

/// All 2^m products R_{i_r} ... R_{i_1} over strictly increasing index
/// tuples, empty product first, ordered by length and then lexicographically
/// (Id, R1, R2, ..., R2R1, R3R1, ...). Inputs must be linear reflectors.
OperatorSet build_psi(std::span<const AffineIsometry> reflectors, const Tolerance& tol = {});

/// {Id, T_1, ..., T_m}.
OperatorSet identity_plus(std::span<const AffineIsometry> ops, const Tolerance& tol = {});

/// {Id, T_1, T_2 T_1, ..., T_m ... T_1}.
OperatorSet identity_plus_prefix_products(std::span<const AffineIsometry> ops,
                                          const Tolerance& tol = {});

}  // namespace circa

#endif  // CIRCA_CIRCUMCENTER_HPP
