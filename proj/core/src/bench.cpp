#include "circa/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "circa/random.hpp"

#ifndef CIRCA_VERSION
#define CIRCA_VERSION "unknown"
#endif

namespace circa {

namespace {

using nlohmann::json;

// ---- operator families built from the instance -----------------------------

std::vector<AffineSubspace> linear_parts(std::span<const AffineSubspace> us) {
  std::vector<AffineSubspace> out;
  out.reserve(us.size());
  for (const auto& u : us) out.emplace_back(Vector::Zero(u.ambient_dim()), u.basis());
  return out;
}

std::vector<AffineSubspace> working_list(const MethodEntry& e, std::span<const AffineSubspace> us) {
  if (e.symmetric) return symmetric_list(us);
  return {us.begin(), us.end()};
}

std::vector<AffineIsometry> reflectors_of(std::span<const AffineSubspace> us) {
  std::vector<AffineIsometry> out;
  out.reserve(us.size());
  for (const auto& u : us) out.push_back(make_reflector(u));
  return out;
}

AveragedMap averaged_map(AveragedForm form, std::span<const AffineSubspace> us) {
  std::vector<AffineIsometry> family{AffineIsometry::identity(us.front().ambient_dim())};
  for (auto& r : reflectors_of(us)) family.push_back(std::move(r));
  const AveragedSpec spec = AveragedSpec::uniform(family.size());
  return form == AveragedForm::sum ? build_sum_averaged(spec, family)
                                   : build_product_averaged(spec, family);
}

AveragedMap averaged_for_recipe(Recipe r, std::span<const AffineSubspace> us) {
  return averaged_map(r == Recipe::identity_plus_reflectors ? AveragedForm::sum : AveragedForm::product,
                      us);
}

OperatorSet operator_set_for(const MethodEntry& e, std::span<const AffineSubspace> us) {
  if (e.recipe == Recipe::custom) return OperatorSet(e.operators, e.operator_labels);
  const std::vector<AffineSubspace> list = working_list(e, us);
  const std::vector<AffineIsometry> refl = reflectors_of(list);
  switch (e.recipe) {
    case Recipe::psi: {
      if (std::all_of(refl.begin(), refl.end(), [](const auto& r) { return r.is_linear_reflector(); })) {
        return build_psi(refl);
      }
      // Affine reflectors: the same products, without the linearity requirement.
      const AffineSubspace w = intersect_or_throw(list);
      const OperatorSet lin = build_psi(reflectors_of(linear_parts(list)));
      std::vector<AffineIsometry> ops;
      for (const auto& op : lin.ops()) {
        const Vector z = w.anchor();
        ops.push_back(AffineIsometry::orthogonal(op.linear(), z - op.linear() * z));
      }
      return OperatorSet(std::move(ops), lin.labels());
    }
    case Recipe::identity_plus_reflectors: return identity_plus(refl);
    case Recipe::identity_plus_prefix_products: return identity_plus_prefix_products(refl);
    case Recipe::custom: break;
  }
  throw PreconditionViolation("unknown operator-set recipe");
}

std::optional<AffineMap> prefix_map(PrefixKind p, std::span<const AffineSubspace> us) {
  switch (p) {
    case PrefixKind::none: return std::nullopt;
    case PrefixKind::projection_product: return projection_product(us);
    case PrefixKind::symmetric_product: return symmetric_projection_product(us);
  }
  return std::nullopt;
}

IterationTrace run_method(const MethodEntry& e, const Instance& inst, const MethodConfig& mc) {
  const auto& us = inst.subspaces;
  switch (e.method) {
    case Method::cim: return run_cim(operator_set_for(e, us), inst.x0, mc);
    case Method::map: {
      const auto list = working_list(e, us);
      return run_map(list, inst.x0, mc);
    }
    case Method::sym_map: return run_sym_map(symmetric_projection_product(us), inst.x0, mc);
    case Method::accel_map: return run_accel(us, inst.x0, mc);
    case Method::dr:
      if (us.size() != 2) throw PreconditionViolation("dr needs exactly two subspaces");
      return run_dr(us[0], us[1], inst.x0, mc);
    case Method::averaged_iter: {
      const auto list = working_list(e, us);
      return run_averaged_iter(averaged_map(e.form, list), inst.x0, mc);
    }
  }
  throw PreconditionViolation("unknown method");
}

// ---- verification checks ---------------------------------------------------

constexpr double kCheckTol = 1e-8;

CheckResult check_firm_quasinonexpansive(const IterationTrace& t) {
  const double floor = kAuditFloor * (1.0 + t.origin.norm());
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < t.iterates.size(); ++k) {
    const double e0 = t.errors[k];
    const double e1 = t.errors[k + 1];
    const double step = (t.iterates[k + 1] - t.iterates[k]).norm();
    const double excess = e1 * e1 + step * step - e0 * e0 * (1.0 + kCheckTol) - floor * floor;
    worst = std::max(worst, excess);
  }
  return {"firm_quasinonexpansive", worst <= 0.0, "max excess " + format_real(worst)};
}

CheckResult check_projection_invariance(const IterationTrace& t, const AffineSubspace& w) {
  double worst = 0.0;
  for (const auto& x : t.iterates) worst = std::max(worst, (w.project(x) - t.target).norm());
  const double allowed = kCheckTol * (1.0 + t.origin.norm());
  return {"projection_invariance", worst <= allowed, "max drift " + format_real(worst)};
}

CheckResult check_target_fixed(const OperatorSet& s, const IterationTrace& t) {
  const double moved = (circumcenter_map(s, t.target) - t.target).norm();
  const double allowed = kCheckTol * (1.0 + t.target.norm());
  return {"target_is_fixed", moved <= allowed, "||C_S p - p|| = " + format_real(moved)};
}

CheckResult check_prefixed_chain(const RateSpec& r) {
  // eta^k c(T) <= gamma^(2(k+1)) for k <= 50.
  double eta = r.value;
  double ct = r.scale.prefactor;
  double gamma = 0.0;
  for (const auto& [name, v] : r.ingredients) {
    if (name == "gamma") gamma = v;
  }
  double worst = 0.0;
  double lhs = ct;
  double rhs = gamma * gamma;
  for (int k = 0; k <= 50; ++k) {
    worst = std::max(worst, lhs - rhs * (1.0 + kAuditTol) - kAuditFloor);
    lhs *= eta;
    rhs *= gamma * gamma;
  }
  return {"prefixed_chain", worst <= 0.0, "max excess " + format_real(worst)};
}

// ---- JSON helpers ----------------------------------------------------------

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json ingredients_json(const std::vector<std::pair<std::string, double>>& ing) {
  json o = json::object();
  for (const auto& [k, v] : ing) o[k] = v;
  return o;
}

std::string_view scale_name(const ScaleMode& s) {
  return s.kind == ScaleMode::Kind::plain ? "plain" : "prefixed";
}

json environment_json() {
  json env;
  env["library"] = std::string("circa ") + CIRCA_VERSION;
#ifdef __VERSION__
  env["compiler"] = __VERSION__;
#endif
  env["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                 "." + std::to_string(EIGEN_MINOR_VERSION);
  env["rng"] = "mt19937_64, uniform=(u>>11)*2^-53, normal=Box-Muller cosine branch";
  return env;
}

json instance_json(const Instance& inst) {
  json o;
  o["ambient_dim"] = inst.x0.size();
  json dims = json::array();
  for (const auto& u : inst.subspaces) dims.push_back(u.dim());
  o["subspace_dims"] = dims;
  o["intersection_dim"] = inst.intersection.dim();
  o["x0"] = vector_json(inst.x0);
  o["attempts"] = inst.attempts;
  return o;
}

}  // namespace

// ---- random instances ------------------------------------------------------

void RandomInstanceSpec::validate() const {
  if (ambient_dim < 1) throw PreconditionViolation("ambient dimension must be >= 1");
  if (count < 1) throw PreconditionViolation("count must be >= 1");
  if (dim_lo < 0 || dim_hi < dim_lo || dim_hi > ambient_dim) {
    throw PreconditionViolation("dim_range must satisfy 0 <= lo <= hi <= ambient_dim");
  }
  if (common_dim < 0 || common_dim > dim_hi) {
    throw PreconditionViolation("common_dim must lie in [0, dim_range hi]");
  }
}

Instance generate_instance(const RandomInstanceSpec& spec, std::uint64_t seed) {
  spec.validate();
  const Eigen::Index n = spec.ambient_dim;
  const Eigen::Index lo = std::max(spec.dim_lo, spec.common_dim);
  Rng rng(seed);
  for (std::size_t attempt = 1; attempt <= kMaxInstanceAttempts; ++attempt) {
    const Matrix common = rng.gaussian_matrix(n, spec.common_dim);
    std::vector<AffineSubspace> us;
    bool degenerate = false;
    for (std::size_t i = 0; i < spec.count; ++i) {
      const auto d = static_cast<Eigen::Index>(rng.uniform_int(lo, spec.dim_hi));
      Matrix span(n, d);
      span << common, rng.gaussian_matrix(n, d - spec.common_dim);
      us.push_back(AffineSubspace::linear_span(span));
      degenerate = degenerate || us.back().dim() != d;
    }
    const Vector x0 = rng.unit_sphere(n);
    if (degenerate) continue;
    AffineSubspace w = intersect_or_throw(us);
    if (w.distance(x0) <= kMinStartDistance) continue;
    Instance inst;
    inst.subspaces = std::move(us);
    inst.intersection = std::move(w);
    inst.x0 = x0;
    inst.attempts = attempt;
    return inst;
  }
  throw Error("generate_instance: no acceptable draw in " + std::to_string(kMaxInstanceAttempts) +
              " attempts (x0 always within " + format_real(kMinStartDistance) +
              " of the intersection?)");
}

Instance resolve_instance(const ExperimentConfig& cfg) {
  Instance inst;
  if (cfg.random) {
    inst = generate_instance(*cfg.random, cfg.random->seed.value_or(cfg.seed));
    if (cfg.x0) inst.x0 = *cfg.x0;
    return inst;
  }
  if (cfg.subspaces.empty()) throw PreconditionViolation("config has no subspaces");
  inst.subspaces = cfg.subspaces;
  inst.intersection = intersect_or_throw(inst.subspaces);
  if (cfg.x0) {
    inst.x0 = *cfg.x0;
    return inst;
  }
  Rng rng(cfg.seed);
  for (std::size_t attempt = 1; attempt <= kMaxInstanceAttempts; ++attempt) {
    inst.x0 = rng.unit_sphere(cfg.ambient_dim);
    inst.attempts = attempt;
    if (inst.intersection.distance(inst.x0) > kMinStartDistance) return inst;
  }
  throw Error("resolve_instance: no starting point farther than " + format_real(kMinStartDistance) +
              " from the intersection");
}

// ---- names -----------------------------------------------------------------

std::string_view to_string(Recipe r) noexcept {
  switch (r) {
    case Recipe::psi: return "psi";
    case Recipe::identity_plus_reflectors: return "identity_plus_reflectors";
    case Recipe::identity_plus_prefix_products: return "identity_plus_prefix_products";
    case Recipe::custom: return "custom";
  }
  return "unknown";
}

std::string_view to_string(PrefixKind p) noexcept {
  switch (p) {
    case PrefixKind::none: return "none";
    case PrefixKind::projection_product: return "projection_product";
    case PrefixKind::symmetric_product: return "symmetric_product";
  }
  return "unknown";
}

std::string_view to_string(AveragedForm f) noexcept {
  return f == AveragedForm::sum ? "sum" : "product";
}

// ---- theoretical rates -----------------------------------------------------

std::optional<RateSpec> theoretical_rate(const MethodEntry& e, const Instance& inst) {
  const std::vector<AffineSubspace> lin = linear_parts(inst.subspaces);
  const AffineSubspace w = intersect_or_throw(lin);
  const double gamma = tuple_angle_cos(lin);

  RateSpec r;
  r.ingredients.emplace_back("gamma", gamma);
  switch (e.method) {
    case Method::map:
    case Method::cim:
      if (e.method == Method::cim && e.recipe == Recipe::custom) {
        const OperatorSet s(e.operators, e.operator_labels);
        if (!s.contains_identity()) return std::nullopt;
        const OperatorSet shifted = shift_operator_set(s, s.common_fixed_set().anchor());
        const AveragedMap a = build_sum_averaged(AveragedSpec::uniform(shifted.size()), shifted.ops());
        const AffineSubspace wf(Vector::Zero(s.dim()), s.common_fixed_set().basis());
        r.ingredients.clear();
        r.constant_name = "||A P_(Fix A)perp||";
        r.value = operator_rate(a.map, wf);
        r.ingredients.emplace_back("alpha", a.alpha);
        return r;
      }
      if (e.method == Method::cim && e.recipe != Recipe::psi) {
        const AveragedMap a = averaged_for_recipe(e.recipe, working_list(e, lin));
        r.constant_name = "||A P_(Fix A)perp||";
        r.value = operator_rate(a.map, w);
        r.ingredients.emplace_back("alpha", a.alpha);
      } else if (e.symmetric) {
        r.constant_name = "gamma^2";
        r.value = gamma * gamma;
      } else {
        r.constant_name = "gamma";
        r.value = gamma;
      }
      break;
    case Method::sym_map:
      r.constant_name = "c(T)";
      r.value = operator_rate(symmetric_projection_product(lin), w);
      break;
    case Method::accel_map: {
      const AccelConstants ac = accel_constants(symmetric_projection_product(lin));
      r.constant_name = "eta";
      r.value = ac.eta;
      r.ingredients.emplace_back("c1", ac.c1);
      r.ingredients.emplace_back("c2", ac.c2);
      r.ingredients.emplace_back("c(T)", ac.c_t);
      break;
    }
    case Method::dr: {
      if (lin.size() != 2) throw PreconditionViolation("dr needs exactly two subspaces");
      const AffineMap t = douglas_rachford_operator(lin[0], lin[1]);
      auto fix = fixed_point_set(t);
      if (!fix) throw EmptyIntersection("dr operator has no fixed point", 0.0);
      r.constant_name = "||T P_(Fix T)perp||";
      r.value = operator_rate(t, *fix);
      r.ingredients.emplace_back("friedrichs_cos", friedrichs_cos(lin[0], lin[1]));
      break;
    }
    case Method::averaged_iter: {
      const AveragedMap a = averaged_map(e.form, working_list(e, lin));
      r.constant_name = "||A P_(Fix A)perp||";
      r.value = operator_rate(a.map, w);
      r.ingredients.emplace_back("alpha", a.alpha);
      break;
    }
  }

  if (e.prefix != PrefixKind::none) {
    const AffineMap p = *prefix_map(e.prefix, lin);
    const bool accel_bridge = e.method == Method::cim && e.recipe == Recipe::psi && e.symmetric &&
                              e.prefix == PrefixKind::symmetric_product;
    if (accel_bridge) {
      const AccelConstants ac = accel_constants(p);
      r.constant_name = "eta";
      r.value = ac.eta;
      r.scale = ScaleMode::prefixed(ac.c_t);
      r.ingredients.emplace_back("c1", ac.c1);
      r.ingredients.emplace_back("c2", ac.c2);
      r.ingredients.emplace_back("c(T)", ac.c_t);
    } else {
      const double prefactor = operator_rate(p, w);
      r.scale = ScaleMode::prefixed(prefactor);
      r.ingredients.emplace_back("||T P_Wperp||", prefactor);
    }
  }
  return r;
}

// ---- experiment ------------------------------------------------------------

bool MethodResult::ok() const {
  return error.empty() && trace.has_value() && (!audit || audit->all_satisfied()) &&
         std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

bool ExperimentReport::ok() const {
  return std::all_of(methods.begin(), methods.end(), [](const MethodResult& m) { return m.ok(); });
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  ExperimentReport report;
  report.config_name = cfg.name;
  report.seed = cfg.random && cfg.random->seed ? *cfg.random->seed : cfg.seed;
  report.instance = resolve_instance(cfg);
  const Instance& inst = report.instance;

  for (const auto& e : cfg.methods) {
    MethodResult res;
    res.name = e.name;
    res.method = std::string(to_string(e.method));
    try {
      MethodConfig mc;
      mc.method = e.method;
      mc.max_iters = e.max_iters.value_or(cfg.max_iters);
      mc.stop_tol = opts.verify ? 0.0 : cfg.stop_tol;
      mc.prefix = prefix_map(e.prefix, inst.subspaces);
      res.trace = run_method(e, inst, mc);

      const std::optional<RateSpec> rate = theoretical_rate(e, inst);
      if (rate) {
        res.audit = audit_bound(*res.trace, rate->value, rate->scale, rate->constant_name);
        res.audit->ingredients = rate->ingredients;
      }
      if (opts.verify && e.method == Method::cim) {
        const OperatorSet s = operator_set_for(e, inst.subspaces);
        if (s.contains_identity()) res.checks.push_back(check_firm_quasinonexpansive(*res.trace));
        res.checks.push_back(check_projection_invariance(*res.trace, s.common_fixed_set()));
        res.checks.push_back(check_target_fixed(s, *res.trace));
      }
      if (opts.verify && rate && rate->constant_name == "eta" &&
          rate->scale.kind == ScaleMode::Kind::prefixed) {
        res.checks.push_back(check_prefixed_chain(*rate));
      }
    } catch (const std::exception& ex) {
      res.error = ex.what();
    }
    report.methods.push_back(std::move(res));
  }
  return report;
}

// ---- reports ---------------------------------------------------------------

std::string report_to_json(const ExperimentReport& report, OutputFormat format) {
  json root;
  root["config"] = report.config_name;
  root["seed"] = report.seed;
  root["environment"] = environment_json();
  root["instance"] = instance_json(report.instance);

  json methods = json::array();
  json failed = json::array();
  for (const auto& m : report.methods) {
    json o;
    o["name"] = m.name;
    o["method"] = m.method;
    o["status"] = m.ok() ? "ok" : (m.error.empty() ? "violated" : "error");
    if (!m.error.empty()) o["error"] = m.error;
    if (m.trace) {
      const auto& t = *m.trace;
      o["iterations"] = t.stopped_at;
      o["initial_error"] = t.errors.front();
      o["final_error"] = t.errors.back();
      json hit = nullptr;
      for (std::size_t k = 0; k < t.errors.size(); ++k) {
        if (t.errors[k] <= 1e-10) {
          hit = k;
          break;
        }
      }
      o["iterations_to_1e-10"] = hit;
      if (format == OutputFormat::csv) {
        o["trace_file"] = m.name + ".trace.csv";
      } else {
        json rows = json::array();
        for (std::size_t k = 0; k < t.iterates.size(); ++k) {
          const double step = k == 0 ? 0.0 : (t.iterates[k] - t.iterates[k - 1]).norm();
          rows.push_back({{"k", k}, {"x_norm", t.iterates[k].norm()}, {"error", t.errors[k]},
                          {"step_norm", step}});
        }
        o["trace"] = rows;
      }
    }
    if (m.audit) {
      const auto& a = *m.audit;
      json r;
      r["constant_name"] = a.constant_name;
      r["value"] = a.value;
      r["ingredients"] = ingredients_json(a.ingredients);
      r["scale"] = scale_name(a.scale);
      if (a.scale.kind == ScaleMode::Kind::prefixed) r["prefactor"] = a.scale.prefactor;
      r["audit_tol"] = kAuditTol;
      r["floor"] = a.floor;
      r["slack_min"] = a.slack_min;
      r["all_satisfied"] = a.all_satisfied();
      r["violations"] = std::count_if(a.per_iteration.begin(), a.per_iteration.end(),
                                      [](const AuditRow& row) { return !row.satisfied; });
      if (format == OutputFormat::csv) {
        r["audit_file"] = m.name + ".audit.csv";
      } else {
        json rows = json::array();
        for (const auto& row : a.per_iteration) {
          rows.push_back({{"k", row.k}, {"error", row.observed}, {"bound", row.bound},
                          {"satisfied", row.satisfied}, {"slack", row.slack}});
        }
        r["rows"] = rows;
      }
      o["rate"] = r;
    } else {
      o["rate"] = nullptr;
    }
    json checks = json::array();
    for (const auto& c : m.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    o["checks"] = checks;
    if (!m.ok()) failed.push_back(m.name);
    methods.push_back(o);
  }
  root["methods"] = methods;
  root["summary"] = {{"methods", report.methods.size()}, {"failed", failed}, {"ok", report.ok()}};
  return root.dump(2) + "\n";
}

std::string rates_to_json(const ExperimentConfig& cfg) {
  const Instance inst = resolve_instance(cfg);
  json root;
  root["config"] = cfg.name;
  root["instance"] = instance_json(inst);
  json methods = json::array();
  for (const auto& e : cfg.methods) {
    json o;
    o["name"] = e.name;
    o["method"] = std::string(to_string(e.method));
    try {
      const auto r = theoretical_rate(e, inst);
      if (r) {
        o["constant_name"] = r->constant_name;
        o["value"] = r->value;
        o["ingredients"] = ingredients_json(r->ingredients);
        o["scale"] = scale_name(r->scale);
        if (r->scale.kind == ScaleMode::Kind::prefixed) o["prefactor"] = r->scale.prefactor;
      } else {
        o["constant_name"] = nullptr;
      }
    } catch (const std::exception& ex) {
      o["error"] = ex.what();
    }
    methods.push_back(o);
  }
  root["methods"] = methods;
  return root.dump(2) + "\n";
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

void write_report(const ExperimentReport& report, const std::filesystem::path& dir,
                  OutputFormat format) {
  std::filesystem::create_directories(dir);
  if (format == OutputFormat::csv) {
    for (const auto& m : report.methods) {
      if (m.trace) write_file_atomic(dir / (m.name + ".trace.csv"), trace_to_csv(*m.trace));
      if (m.audit) write_file_atomic(dir / (m.name + ".audit.csv"), report_to_csv(*m.audit));
    }
  }
  write_file_atomic(dir / "report.json", report_to_json(report, format));
}

}  // namespace circa
