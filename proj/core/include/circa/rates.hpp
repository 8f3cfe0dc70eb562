#ifndef CIRCA_RATES_HPP
#define CIRCA_RATES_HPP

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "circa/isometry.hpp"
#include "circa/methods.hpp"
#include "circa/numerics.hpp"
#include "circa/subspace.hpp"

namespace circa {

/// Relative slack allowed when comparing an observed error with its bound.
inline constexpr double kAuditTol = 1e-8;
/// Absolute slack, times (1 + ||x0||): errors cannot drop below round-off.
inline constexpr double kAuditFloor = 1e-12;

/// c(U, V) = ||P_V P_U P_{(U cap V)^perp}|| for linear U, V.
double friedrichs_cos(const AffineSubspace& u, const AffineSubspace& v, const Tolerance& tol = {});

/// ||P_{U_m} ... P_{U_1} P_{(cap U_i)^perp}|| for linear U_i.
double tuple_angle_cos(std::span<const AffineSubspace> us, const Tolerance& tol = {});

/// ||A P_{W^perp}|| for linear A and a linear subspace W fixed by A.
double operator_rate(const AffineMap& a, const AffineSubspace& w, const Tolerance& tol = {});

struct AccelConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double eta = 0.0;
  /// c(T) = ||T P_{(Fix T)^perp}||
  double c_t = 0.0;
};

/// Rayleigh extremes of T on (Fix T)^perp and the accelerated rate
/// eta = (c2 - c1) / (2 - c1 - c2), for linear, self-adjoint, nonexpansive,
/// monotone T. Throws Error if 0 <= eta <= cT/(2-cT) <= cT < 1 fails
/// beyond kAuditTol.
AccelConstants accel_constants(const AffineMap& t, const Tolerance& tol = {});

struct ScaleMode {
  enum class Kind { plain, prefixed };
  Kind kind = Kind::plain;
  double prefactor = 1.0;

  /// bound_k = rate^k * error_0
  static ScaleMode plain() { return {}; }
  /// bound_k = rate^k * prefactor * ||x - P x|| at the pre-prefix point
  static ScaleMode prefixed(double prefactor) { return {Kind::prefixed, prefactor}; }
};

struct AuditRow {
  std::size_t k = 0;
  double observed = 0.0;
  double bound = 0.0;
  bool satisfied = true;
  /// (allowed - observed) / allowed, allowed = bound (1 + kAuditTol) + floor.
  double slack = 1.0;
};

struct RateReport {
  std::string constant_name;
  double value = 0.0;
  std::vector<std::pair<std::string, double>> ingredients;
  ScaleMode scale;
  double floor = 0.0;
  std::vector<AuditRow> per_iteration;
  double slack_min = 1.0;

  bool all_satisfied() const;
};

/// Checks observed_k <= bound_k (1 + kAuditTol) + kAuditFloor (1 + ||x0||).
RateReport audit_bound(const IterationTrace& trace, double rate, ScaleMode mode = ScaleMode::plain(),
                       std::string constant_name = "rate");

/// CSV with header `k,error,bound,slack`.
std::string report_to_csv(const RateReport& report);

}  // namespace circa

#endif  // CIRCA_RATES_HPP
