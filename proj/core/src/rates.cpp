#include "circa/rates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "circa/errors.hpp"

namespace circa {

namespace {

void require_linear(const AffineSubspace& u, const Tolerance& tol, const char* who) {
  if (!u.is_linear(tol)) throw PreconditionViolation(std::string(who) + ": subspace is not linear");
}

Matrix complement_projector(const AffineSubspace& w) {
  const Eigen::Index n = w.ambient_dim();
  return Matrix::Identity(n, n) - w.direction_projector();
}

}  // namespace

double friedrichs_cos(const AffineSubspace& u, const AffineSubspace& v, const Tolerance& tol) {
  const std::vector<AffineSubspace> pair{u, v};
  return tuple_angle_cos(pair, tol);
}

double tuple_angle_cos(std::span<const AffineSubspace> us, const Tolerance& tol) {
  if (us.empty()) throw PreconditionViolation("tuple_angle_cos: empty list");
  const Eigen::Index n = us.front().ambient_dim();
  Matrix product = Matrix::Identity(n, n);
  for (const auto& u : us) {
    require_linear(u, tol, "tuple_angle_cos");
    if (u.ambient_dim() != n) throw DimensionMismatch("tuple_angle_cos: mixed ambient dimensions");
    product = u.direction_projector() * product;
  }
  const AffineSubspace w = intersect_or_throw(us, tol);
  return spectral_norm(product * complement_projector(w));
}

double operator_rate(const AffineMap& a, const AffineSubspace& w, const Tolerance& tol) {
  if (!a.is_linear(tol)) throw PreconditionViolation("operator_rate: A is not linear");
  require_linear(w, tol, "operator_rate");
  if (w.ambient_dim() != a.dim()) throw DimensionMismatch("operator_rate: dimension mismatch");
  const Matrix& b = w.basis();
  if (b.cols() > 0 && max_abs(a.linear() * b - b) > tol.consistency_tol) {
    throw PreconditionViolation("operator_rate: W is not fixed by A");
  }
  return spectral_norm(a.linear() * complement_projector(w));
}

AccelConstants accel_constants(const AffineMap& t, const Tolerance& tol) {
  if (!t.is_linear(tol)) throw PreconditionViolation("accel_constants: T is not linear");
  if (!t.is_self_adjoint(tol)) throw PreconditionViolation("accel_constants: T is not self-adjoint");
  if (spectral_norm(t.linear()) > 1.0 + tol.eq_tol) {
    throw PreconditionViolation("accel_constants: T is expansive");
  }
  if (sym_eigen_extremes(t.linear()).lambda_min < -tol.eq_tol) {
    throw PreconditionViolation("accel_constants: T is not monotone");
  }
  auto fix = fixed_point_set(t, tol);
  if (!fix) throw EmptyIntersection("accel_constants: T has no fixed point", 0.0);

  AccelConstants out;
  const AffineSubspace perp = orthogonal_complement(*fix, tol);
  if (perp.dim() == 0) return out;

  const Matrix& b = perp.basis();
  const EigenExtremes ext = sym_eigen_extremes(b.transpose() * t.linear() * b);
  out.c1 = ext.lambda_min;
  out.c2 = ext.lambda_max;
  out.eta = (out.c2 - out.c1) / (2.0 - out.c1 - out.c2);
  out.c_t = operator_rate(t, *fix, tol);

  const double ct_bound = out.c_t / (2.0 - out.c_t);
  const bool chain = out.eta >= -kAuditTol && out.eta <= ct_bound + kAuditTol &&
                     ct_bound <= out.c_t + kAuditTol && out.c_t < 1.0;
  if (!chain) {
    throw Error("accel_constants: chain 0 <= eta <= c(T)/(2-c(T)) <= c(T) < 1 violated (eta=" +
                format_real(out.eta) + ", c(T)=" + format_real(out.c_t) + ")");
  }
  return out;
}

bool RateReport::all_satisfied() const {
  return std::all_of(per_iteration.begin(), per_iteration.end(),
                     [](const AuditRow& r) { return r.satisfied; });
}

RateReport audit_bound(const IterationTrace& trace, double rate, ScaleMode mode,
                       std::string constant_name) {
  if (trace.errors.empty()) throw PreconditionViolation("audit_bound: trace has no errors");
  if (!(rate >= 0.0)) throw PreconditionViolation("audit_bound: rate must be nonnegative");

  RateReport report;
  report.constant_name = std::move(constant_name);
  report.value = rate;
  report.scale = mode;
  report.floor = kAuditFloor * (1.0 + trace.origin.norm());

  const double scale = mode.kind == ScaleMode::Kind::plain ? trace.errors.front()
                                                           : mode.prefactor * trace.origin_error;
  double power = 1.0;
  for (std::size_t k = 0; k < trace.errors.size(); ++k) {
    AuditRow row;
    row.k = k;
    row.observed = trace.errors[k];
    row.bound = power * scale;
    const double allowed = row.bound * (1.0 + kAuditTol) + report.floor;
    row.satisfied = row.observed <= allowed;
    row.slack = allowed > 0.0 ? (allowed - row.observed) / allowed : 1.0;
    report.slack_min = std::min(report.slack_min, row.slack);
    report.per_iteration.push_back(row);
    power *= rate;
  }
  return report;
}

std::string report_to_csv(const RateReport& report) {
  std::ostringstream out;
  out << "k,error,bound,slack\n";
  for (const auto& r : report.per_iteration) {
    out << r.k << ',' << format_real(r.observed) << ',' << format_real(r.bound) << ','
        << format_real(r.slack) << '\n';
  }
  return out.str();
}

}  // namespace circa
