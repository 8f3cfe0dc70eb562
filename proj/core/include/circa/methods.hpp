#ifndef CIRCA_METHODS_HPP
#define CIRCA_METHODS_HPP

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "circa/circumcenter.hpp"
#include "circa/isometry.hpp"
#include "circa/numerics.hpp"
#include "circa/subspace.hpp"

namespace circa {

enum class Method { cim, map, sym_map, accel_map, dr, averaged_iter };

std::string_view to_string(Method m) noexcept;
/// Inverse of to_string; throws PreconditionViolation on an unknown tag.
Method method_from_string(std::string_view tag);

struct MethodConfig {
  Method method = Method::cim;
  std::size_t max_iters = 100;
  /// Stop once ||x_{k+1} - x_k|| <= stop_tol. 0 runs exactly max_iters steps.
  double stop_tol = 0.0;
  /// Applied once to x0 before iterating.
  std::optional<AffineMap> prefix;

  void validate() const;
};

struct IterationTrace {
  Method method = Method::cim;
  /// x0 after the prefix, then x1, x2, ...
  std::vector<Vector> iterates;
  /// ||x_k - target||, one per iterate.
  std::vector<double> errors;
  /// Number of steps actually taken.
  std::size_t stopped_at = 0;
  std::chrono::duration<double> wall_time{0.0};
  /// Projection of the original (pre-prefix) x0 onto the solution set.
  Vector target;
  /// The original x0.
  Vector origin;
  /// ||origin - target||.
  double origin_error = 0.0;
};

/// x_{k+1} = C_S x_k.
IterationTrace run_cim(const OperatorSet& s, const Vector& x0, const MethodConfig& cfg);

/// Cyclic projections x_{k+1} = P_{U_m} ... P_{U_1} x_k.
IterationTrace run_map(std::span<const AffineSubspace> us, const Vector& x0,
                       const MethodConfig& cfg);

/// x_{k+1} = T x_k for self-adjoint nonexpansive T.
IterationTrace run_sym_map(const AffineMap& t, const Vector& x0, const MethodConfig& cfg);

/// x_{k+1} = A_T x_k (accelerated mapping of a self-adjoint nonexpansive T).
IterationTrace run_accel(const AffineMap& t, const Vector& x0, const MethodConfig& cfg);

/// A_T iteration for T = P_1 ... P_m ... P_1 given by its linear subspaces.
/// <x, x - Tx> is accumulated as a sum of squared projection residuals, so
/// the step stays accurate close to Fix T, where the matrix form stalls near
/// sqrt(eps) ||x||.
IterationTrace run_accel(std::span<const AffineSubspace> us, const Vector& x0, const MethodConfig& cfg);

/// Douglas-Rachford: x_{k+1} = 1/2 (Id + R_{U_2} R_{U_1}) x_k.
IterationTrace run_dr(const AffineSubspace& u1, const AffineSubspace& u2, const Vector& x0,
                      const MethodConfig& cfg);

struct BlockMode {
  enum class Kind { compose, convex };
  Kind kind = Kind::compose;
  /// Convex mode only; one positive weight per block, summing to 1.
  std::vector<double> weights;

  static BlockMode composition() { return {}; }
  static BlockMode convex(std::vector<double> w) { return {Kind::convex, std::move(w)}; }
};

/// Composition C_{S_p} ... C_{S_1} or combination sum_j w_j C_{S_j} of block
/// circumcenter maps. Each block must contain Id.
IterationTrace run_blockwise_cim(std::span<const OperatorSet> blocks, const BlockMode& mode,
                                 const Vector& x0, const MethodConfig& cfg);

/// Power iteration of an averaged linear map.
IterationTrace run_averaged_iter(const AveragedMap& a, const Vector& x0, const MethodConfig& cfg);

// ---- operators used by the drivers (also needed for rate constants) --------

/// P_{U_m} ... P_{U_1}.
AffineMap projection_product(std::span<const AffineSubspace> us);

/// P_{U_1} ... P_{U_{n-1}} P_{U_n} P_{U_{n-1}} ... P_{U_1}.
AffineMap symmetric_projection_product(std::span<const AffineSubspace> us);

/// (U_1, ..., U_n) -> (U_1, ..., U_n, U_{n-1}, ..., U_1).
std::vector<AffineSubspace> symmetric_list(std::span<const AffineSubspace> us);

/// 1/2 (Id + R_{U_2} R_{U_1}).
AffineMap douglas_rachford_operator(const AffineSubspace& u1, const AffineSubspace& u2);

// ---- serialization ---------------------------------------------------------

/// Shortest decimal form that round-trips; identical bits give identical text.
std::string format_real(double v);

/// CSV with header `k,x_norm,error,step_norm` (step_norm of row 0 is 0).
std::string trace_to_csv(const IterationTrace& trace);

}  // namespace circa

#endif  // CIRCA_METHODS_HPP
