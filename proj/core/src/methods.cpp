#include "circa/methods.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "circa/errors.hpp"

namespace circa {

namespace {

using Clock = std::chrono::steady_clock;

template <class Step>
IterationTrace iterate(Method method, Step&& step, const Vector& x0, const Vector& target,
                       const MethodConfig& cfg) {
  cfg.validate();
  if (x0.size() != target.size()) throw DimensionMismatch("starting point has wrong dimension");
  if (!x0.allFinite()) throw PreconditionViolation("starting point is not finite");

  const auto start = Clock::now();
  IterationTrace trace;
  trace.method = method;
  trace.origin = x0;
  trace.target = target;
  trace.origin_error = (x0 - target).norm();

  Vector x = cfg.prefix ? cfg.prefix->apply(x0) : x0;
  if (x.size() != x0.size()) throw DimensionMismatch("prefix operator has wrong dimension");
  trace.iterates.reserve(cfg.max_iters + 1);
  trace.errors.reserve(cfg.max_iters + 1);
  trace.iterates.push_back(x);
  trace.errors.push_back((x - target).norm());

  for (std::size_t k = 0; k < cfg.max_iters; ++k) {
    Vector next = step(x);
    if (!next.allFinite()) {
      throw Error(std::string(to_string(method)) + ": non-finite iterate at step " +
                  std::to_string(k + 1));
    }
    const double moved = (next - x).norm();
    x = std::move(next);
    trace.iterates.push_back(x);
    trace.errors.push_back((x - target).norm());
    trace.stopped_at = k + 1;
    if (cfg.stop_tol > 0.0 && moved <= cfg.stop_tol) break;
  }
  trace.wall_time = Clock::now() - start;
  return trace;
}

AffineSubspace fixed_set_or_throw(const AffineMap& t, const char* who) {
  auto fix = fixed_point_set(t);
  if (!fix) throw EmptyIntersection(std::string(who) + ": operator has no fixed point", 0.0);
  return *std::move(fix);
}

void require_self_adjoint_nonexpansive(const AffineMap& t, const char* who) {
  const Tolerance tol;
  if (!t.is_self_adjoint(tol)) throw PreconditionViolation(std::string(who) + ": T not self-adjoint");
  if (spectral_norm(t.linear()) > 1.0 + tol.eq_tol) {
    throw PreconditionViolation(std::string(who) + ": T is expansive");
  }
}

void require_same_dim(std::span<const AffineSubspace> us, const char* who) {
  if (us.empty()) throw PreconditionViolation(std::string(who) + ": no subspaces");
  for (const auto& u : us) {
    if (u.ambient_dim() != us.front().ambient_dim()) {
      throw DimensionMismatch(std::string(who) + ": subspaces differ in ambient dimension");
    }
  }
}

}  // namespace

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::cim: return "cim";
    case Method::map: return "map";
    case Method::sym_map: return "sym_map";
    case Method::accel_map: return "accel_map";
    case Method::dr: return "dr";
    case Method::averaged_iter: return "averaged_iter";
  }
  return "unknown";
}

Method method_from_string(std::string_view tag) {
  for (Method m : {Method::cim, Method::map, Method::sym_map, Method::accel_map, Method::dr,
                   Method::averaged_iter}) {
    if (to_string(m) == tag) return m;
  }
  throw PreconditionViolation("unknown method tag '" + std::string(tag) + "'");
}

void MethodConfig::validate() const {
  if (!(stop_tol >= 0.0)) throw PreconditionViolation("MethodConfig: stop_tol must be >= 0");
}

IterationTrace run_cim(const OperatorSet& s, const Vector& x0, const MethodConfig& cfg) {
  if (x0.size() != s.dim()) throw DimensionMismatch("run_cim: dimension mismatch");
  const Vector target = s.common_fixed_set().project(x0);
  return iterate(Method::cim, [&](const Vector& x) { return circumcenter_map(s, x); }, x0, target,
                 cfg);
}

IterationTrace run_map(std::span<const AffineSubspace> us, const Vector& x0,
                       const MethodConfig& cfg) {
  require_same_dim(us, "run_map");
  if (x0.size() != us.front().ambient_dim()) throw DimensionMismatch("run_map: dimension mismatch");
  const Vector target = intersect_or_throw(us).project(x0);
  auto sweep = [&](const Vector& x) {
    Vector y = x;
    for (const auto& u : us) y = u.project(y);
    return y;
  };
  return iterate(Method::map, sweep, x0, target, cfg);
}

IterationTrace run_sym_map(const AffineMap& t, const Vector& x0, const MethodConfig& cfg) {
  require_self_adjoint_nonexpansive(t, "run_sym_map");
  if (x0.size() != t.dim()) throw DimensionMismatch("run_sym_map: dimension mismatch");
  const Vector target = fixed_set_or_throw(t, "run_sym_map").project(x0);
  return iterate(Method::sym_map, [&](const Vector& x) { return t.apply(x); }, x0, target, cfg);
}

IterationTrace run_accel(const AffineMap& t, const Vector& x0, const MethodConfig& cfg) {
  require_self_adjoint_nonexpansive(t, "run_accel");
  if (x0.size() != t.dim()) throw DimensionMismatch("run_accel: dimension mismatch");
  const AcceleratedMap accel(t);
  const Vector target = fixed_set_or_throw(t, "run_accel").project(x0);
  return iterate(Method::accel_map, [&](const Vector& x) { return accel.apply(x); }, x0, target,
                 cfg);
}

IterationTrace run_accel(std::span<const AffineSubspace> us, const Vector& x0, const MethodConfig& cfg) {
  if (us.empty()) throw PreconditionViolation("run_accel: empty subspace list");
  for (const auto& u : us) {
    if (u.ambient_dim() != x0.size()) throw DimensionMismatch("run_accel: dimension mismatch");
    if (!u.is_linear()) throw PreconditionViolation("run_accel: subspaces must be linear");
  }
  const Vector target = intersect_or_throw(us).project(x0);
  constexpr double floor = 256.0 * std::numeric_limits<double>::epsilon();

  // T = G^* G with G = P_m ... P_1, so <x, x - Tx> = ||x||^2 - ||G x||^2
  // = sum_i ||(I - P_i) y_{i-1}||^2 with y_0 = x, y_i = P_i y_{i-1}.
  auto step = [&](const Vector& x) -> Vector {
    double inner = 0.0;
    Vector y = x;
    for (const auto& u : us) {
      const Vector py = u.project(y);
      inner += (y - py).squaredNorm();
      y = py;
    }
    for (std::size_t i = us.size() - 1; i-- > 0;) y = us[i].project(y);
    const Vector diff = x - y;
    const double gap = diff.norm();
    if (gap <= floor * (1.0 + x.norm())) return x;
    return x - (inner / (gap * gap)) * diff;
  };
  return iterate(Method::accel_map, step, x0, target, cfg);
}

IterationTrace run_dr(const AffineSubspace& u1, const AffineSubspace& u2, const Vector& x0,
                      const MethodConfig& cfg) {
  const AffineMap t = douglas_rachford_operator(u1, u2);
  if (x0.size() != t.dim()) throw DimensionMismatch("run_dr: dimension mismatch");
  const Vector target = fixed_set_or_throw(t, "run_dr").project(x0);
  return iterate(Method::dr, [&](const Vector& x) { return t.apply(x); }, x0, target, cfg);
}

IterationTrace run_blockwise_cim(std::span<const OperatorSet> blocks, const BlockMode& mode,
                                 const Vector& x0, const MethodConfig& cfg) {
  if (blocks.empty()) throw PreconditionViolation("run_blockwise_cim: no blocks");
  std::vector<AffineSubspace> fixed;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    if (!blocks[j].contains_identity()) {
      throw PreconditionViolation("run_blockwise_cim: block " + std::to_string(j) +
                                  " does not contain Id");
    }
    if (blocks[j].dim() != x0.size()) throw DimensionMismatch("run_blockwise_cim: dimension mismatch");
    fixed.push_back(blocks[j].common_fixed_set());
  }
  if (mode.kind == BlockMode::Kind::convex) {
    if (mode.weights.size() != blocks.size()) {
      throw PreconditionViolation("run_blockwise_cim: need one weight per block");
    }
    for (double w : mode.weights) {
      if (!(w > 0.0 && w <= 1.0)) throw PreconditionViolation("run_blockwise_cim: weight outside (0,1]");
    }
    const double total = std::accumulate(mode.weights.begin(), mode.weights.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12) {
      throw PreconditionViolation("run_blockwise_cim: weights must sum to 1");
    }
  }
  const Vector target = intersect_or_throw(fixed).project(x0);

  auto step = [&](const Vector& x) -> Vector {
    if (mode.kind == BlockMode::Kind::compose) {
      Vector y = x;
      for (const auto& b : blocks) y = circumcenter_map(b, y);
      return y;
    }
    Vector y = Vector::Zero(x.size());
    for (std::size_t j = 0; j < blocks.size(); ++j) y += mode.weights[j] * circumcenter_map(blocks[j], x);
    return y;
  };
  return iterate(Method::cim, step, x0, target, cfg);
}

IterationTrace run_averaged_iter(const AveragedMap& a, const Vector& x0, const MethodConfig& cfg) {
  if (x0.size() != a.map.dim()) throw DimensionMismatch("run_averaged_iter: dimension mismatch");
  if (!(a.alpha > 0.0 && a.alpha < 1.0)) {
    throw PreconditionViolation("run_averaged_iter: averagedness constant outside (0,1)");
  }
  const Vector target = fixed_set_or_throw(a.map, "run_averaged_iter").project(x0);
  return iterate(Method::averaged_iter, [&](const Vector& x) { return a.map.apply(x); }, x0, target,
                 cfg);
}

AffineMap projection_product(std::span<const AffineSubspace> us) {
  require_same_dim(us, "projection_product");
  AffineMap t = AffineMap::identity(us.front().ambient_dim());
  for (const auto& u : us) t = compose(AffineMap::projector(u), t);
  return t;
}

std::vector<AffineSubspace> symmetric_list(std::span<const AffineSubspace> us) {
  require_same_dim(us, "symmetric_list");
  std::vector<AffineSubspace> out(us.begin(), us.end());
  for (std::size_t i = us.size() - 1; i-- > 0;) out.push_back(us[i]);
  return out;
}

AffineMap symmetric_projection_product(std::span<const AffineSubspace> us) {
  const std::vector<AffineSubspace> full = symmetric_list(us);
  AffineMap t = projection_product(full);
  if (t.is_linear()) return AffineMap(0.5 * (t.linear() + t.linear().transpose()));
  return t;
}

AffineMap douglas_rachford_operator(const AffineSubspace& u1, const AffineSubspace& u2) {
  if (u1.ambient_dim() != u2.ambient_dim()) {
    throw DimensionMismatch("douglas_rachford_operator: subspaces differ in ambient dimension");
  }
  const AffineIsometry r = compose(make_reflector(u2), make_reflector(u1));
  const Eigen::Index n = u1.ambient_dim();
  return AffineMap(0.5 * (Matrix::Identity(n, n) + r.linear()), 0.5 * r.offset());
}

std::string format_real(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string trace_to_csv(const IterationTrace& trace) {
  std::ostringstream out;
  out << "k,x_norm,error,step_norm\n";
  for (std::size_t k = 0; k < trace.iterates.size(); ++k) {
    const double step = k == 0 ? 0.0 : (trace.iterates[k] - trace.iterates[k - 1]).norm();
    out << k << ',' << format_real(trace.iterates[k].norm()) << ',' << format_real(trace.errors[k])
        << ',' << format_real(step) << '\n';
  }
  return out.str();
}

}  // namespace circa
