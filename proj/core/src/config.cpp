#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "circa/bench.hpp"

namespace circa {

namespace {

using nlohmann::json;

std::string at(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void reject_unknown_keys(const json& obj, const std::string& path,
                         std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError(at(path, key), "unknown field");
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) throw ConfigError(at(path, key), "missing required field");
  return obj.at(key);
}

double as_real(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "expected a finite number");
  return x;
}

std::uint64_t as_count(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(path, "expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ConfigError(path, "expected true or false");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

Vector as_vector(const json& v, const std::string& path, Eigen::Index n) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
  if (static_cast<Eigen::Index>(v.size()) != n) {
    throw ConfigError(path, "expected " + std::to_string(n) + " entries, got " +
                                std::to_string(v.size()));
  }
  Vector out(n);
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = as_real(v[i], at(path, i));
  return out;
}

AffineSubspace as_subspace(const json& v, const std::string& path, Eigen::Index n) {
  if (!v.is_object()) throw ConfigError(path, "expected a subspace object {anchor, span}");
  reject_unknown_keys(v, path, {"anchor", "span"});
  const Vector anchor = v.contains("anchor") ? as_vector(v["anchor"], at(path, "anchor"), n)
                                             : Vector::Zero(n);
  std::vector<Vector> span;
  if (v.contains("span")) {
    const json& s = v["span"];
    if (!s.is_array()) throw ConfigError(at(path, "span"), "expected a list of vectors");
    for (std::size_t i = 0; i < s.size(); ++i) span.push_back(as_vector(s[i], at(at(path, "span"), i), n));
  }
  if (span.empty()) return AffineSubspace::point(anchor);
  return AffineSubspace::from_span(anchor, span);
}

AffineIsometry as_operator(const json& v, const std::string& path, Eigen::Index n,
                           const std::vector<AffineSubspace>& subspaces) {
  if (!v.is_object()) throw ConfigError(path, "expected an operator object with a \"kind\"");
  const std::string kind = as_string(require(v, path, "kind"), at(path, "kind"));
  try {
    if (kind == "identity") {
      reject_unknown_keys(v, path, {"kind"});
      return AffineIsometry::identity(n);
    }
    if (kind == "reflector") {
      reject_unknown_keys(v, path, {"kind", "subspace", "subspace_index"});
      if (v.contains("subspace_index")) {
        const auto i = as_count(v["subspace_index"], at(path, "subspace_index"));
        if (i >= subspaces.size()) {
          throw ConfigError(at(path, "subspace_index"), "no explicit subspace with this index");
        }
        return make_reflector(subspaces[i]);
      }
      return make_reflector(as_subspace(require(v, path, "subspace"), at(path, "subspace"), n));
    }
    if (kind == "translation") {
      reject_unknown_keys(v, path, {"kind", "vector"});
      return make_translation(as_vector(require(v, path, "vector"), at(path, "vector"), n));
    }
    if (kind == "orthogonal") {
      reject_unknown_keys(v, path, {"kind", "matrix", "offset"});
      const json& rows = require(v, path, "matrix");
      const std::string mpath = at(path, "matrix");
      if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n) {
        throw ConfigError(mpath, "expected " + std::to_string(n) + " rows");
      }
      Matrix q(n, n);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        q.row(static_cast<Eigen::Index>(i)) = as_vector(rows[i], at(mpath, i), n).transpose();
      }
      const Vector b = v.contains("offset") ? as_vector(v["offset"], at(path, "offset"), n)
                                            : Vector::Zero(n);
      return AffineIsometry::orthogonal(q, b);
    }
    if (kind == "compose") {
      reject_unknown_keys(v, path, {"kind", "of"});
      const json& of = require(v, path, "of");
      if (!of.is_array() || of.empty()) throw ConfigError(at(path, "of"), "expected a nonempty list");
      std::vector<AffineIsometry> parts;
      for (std::size_t i = 0; i < of.size(); ++i) {
        parts.push_back(as_operator(of[i], at(at(path, "of"), i), n, subspaces));
      }
      return compose_all(parts, n);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(at(path, "kind"),
                    "expected one of identity, reflector, translation, orthogonal, compose");
}

template <class Enum, std::size_t N>
Enum as_enum(const json& v, const std::string& path, const std::pair<const char*, Enum> (&options)[N]) {
  const std::string s = as_string(v, path);
  std::string all;
  for (const auto& [name, value] : options) {
    if (s == name) return value;
    all += all.empty() ? name : std::string(", ") + name;
  }
  throw ConfigError(path, "expected one of " + all + ", got '" + s + "'");
}

constexpr std::pair<const char*, Method> kMethods[] = {
    {"cim", Method::cim},           {"map", Method::map}, {"sym_map", Method::sym_map},
    {"accel_map", Method::accel_map}, {"dr", Method::dr},   {"averaged_iter", Method::averaged_iter}};
constexpr std::pair<const char*, Recipe> kRecipes[] = {
    {"psi", Recipe::psi},
    {"identity_plus_reflectors", Recipe::identity_plus_reflectors},
    {"identity_plus_prefix_products", Recipe::identity_plus_prefix_products},
    {"custom", Recipe::custom}};
constexpr std::pair<const char*, PrefixKind> kPrefixes[] = {
    {"none", PrefixKind::none},
    {"projection_product", PrefixKind::projection_product},
    {"symmetric_product", PrefixKind::symmetric_product}};
constexpr std::pair<const char*, AveragedForm> kForms[] = {{"sum", AveragedForm::sum},
                                                          {"product", AveragedForm::product}};

MethodEntry as_method(const json& v, const std::string& path, Eigen::Index n,
                      const std::vector<AffineSubspace>& subspaces) {
  if (!v.is_object()) throw ConfigError(path, "expected a method object");
  reject_unknown_keys(v, path,
                      {"name", "method", "operator_set", "symmetric", "prefix", "form", "operators",
                       "max_iters"});
  MethodEntry m;
  m.name = as_string(require(v, path, "name"), at(path, "name"));
  if (m.name.empty() || m.name.find_first_of("/\\ ") != std::string::npos) {
    throw ConfigError(at(path, "name"), "names must be nonempty without spaces or slashes");
  }
  m.method = as_enum(require(v, path, "method"), at(path, "method"), kMethods);
  if (v.contains("operator_set")) {
    if (m.method != Method::cim) throw ConfigError(at(path, "operator_set"), "only valid for cim");
    m.recipe = as_enum(v["operator_set"], at(path, "operator_set"), kRecipes);
  }
  if (v.contains("symmetric")) m.symmetric = as_bool(v["symmetric"], at(path, "symmetric"));
  if (v.contains("prefix")) m.prefix = as_enum(v["prefix"], at(path, "prefix"), kPrefixes);
  if (v.contains("form")) {
    if (m.method != Method::averaged_iter) throw ConfigError(at(path, "form"), "only valid for averaged_iter");
    m.form = as_enum(v["form"], at(path, "form"), kForms);
  }
  if (v.contains("max_iters")) m.max_iters = as_count(v["max_iters"], at(path, "max_iters"));

  const bool custom = m.method == Method::cim && m.recipe == Recipe::custom;
  if (custom) {
    const json& ops = require(v, path, "operators");
    if (!ops.is_array() || ops.empty()) {
      throw ConfigError(at(path, "operators"), "expected a nonempty list of operators");
    }
    for (std::size_t i = 0; i < ops.size(); ++i) {
      m.operators.push_back(as_operator(ops[i], at(at(path, "operators"), i), n, subspaces));
      m.operator_labels.push_back("T" + std::to_string(i + 1));
    }
  } else if (v.contains("operators")) {
    throw ConfigError(at(path, "operators"), "only valid with operator_set custom");
  }
  if (m.prefix != PrefixKind::none && (custom || m.method == Method::dr)) {
    throw ConfigError(at(path, "prefix"), "prefixes are supported only when the solution set is "
                                          "the intersection of the subspaces");
  }
  if (m.symmetric && (custom || m.method == Method::dr || m.method == Method::sym_map ||
                      m.method == Method::accel_map)) {
    throw ConfigError(at(path, "symmetric"), "not applicable to this method");
  }
  return m;
}

std::string position_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    throw ConfigError(position_of(text, byte), "syntax error");
  }
  if (!root.is_object()) throw ConfigError("(root)", "expected a JSON object");
  reject_unknown_keys(root, "",
                      {"name", "ambient_dim", "seed", "max_iters", "stop_tol", "output_dir",
                       "instance", "x0", "methods"});

  ExperimentConfig cfg;
  if (root.contains("name")) cfg.name = as_string(root["name"], "name");
  const auto n = as_count(require(root, "", "ambient_dim"), "ambient_dim");
  if (n < 1) throw ConfigError("ambient_dim", "must be >= 1");
  cfg.ambient_dim = static_cast<Eigen::Index>(n);
  if (root.contains("seed")) cfg.seed = as_count(root["seed"], "seed");
  if (root.contains("max_iters")) cfg.max_iters = as_count(root["max_iters"], "max_iters");
  if (root.contains("stop_tol")) {
    cfg.stop_tol = as_real(root["stop_tol"], "stop_tol");
    if (cfg.stop_tol < 0.0) throw ConfigError("stop_tol", "must be >= 0");
  }
  if (root.contains("output_dir")) cfg.output_dir = as_string(root["output_dir"], "output_dir");

  const json& inst = require(root, "", "instance");
  if (!inst.is_object()) throw ConfigError("instance", "expected an object");
  reject_unknown_keys(inst, "instance", {"subspaces", "random"});
  if (inst.contains("subspaces") == inst.contains("random")) {
    throw ConfigError("instance", "give exactly one of subspaces, random");
  }
  if (inst.contains("subspaces")) {
    const json& list = inst["subspaces"];
    if (!list.is_array() || list.empty()) {
      throw ConfigError("instance.subspaces", "expected a nonempty list");
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
      cfg.subspaces.push_back(as_subspace(list[i], at("instance.subspaces", i), cfg.ambient_dim));
    }
  } else {
    const json& r = inst["random"];
    const std::string p = "instance.random";
    if (!r.is_object()) throw ConfigError(p, "expected an object");
    reject_unknown_keys(r, p, {"count", "dim_range", "common_dim", "seed"});
    RandomInstanceSpec spec;
    spec.ambient_dim = cfg.ambient_dim;
    spec.count = as_count(require(r, p, "count"), at(p, "count"));
    const json& range = require(r, p, "dim_range");
    if (!range.is_array() || range.size() != 2) throw ConfigError(at(p, "dim_range"), "expected [lo, hi]");
    spec.dim_lo = static_cast<Eigen::Index>(as_count(range[0], at(p, "dim_range[0]")));
    spec.dim_hi = static_cast<Eigen::Index>(as_count(range[1], at(p, "dim_range[1]")));
    if (r.contains("common_dim")) {
      spec.common_dim = static_cast<Eigen::Index>(as_count(r["common_dim"], at(p, "common_dim")));
    }
    if (r.contains("seed")) spec.seed = as_count(r["seed"], at(p, "seed"));
    try {
      spec.validate();
    } catch (const Error& e) {
      throw ConfigError(p, e.what());
    }
    cfg.random = spec;
  }

  if (root.contains("x0")) {
    const json& x0 = root["x0"];
    if (x0.is_array()) {
      cfg.x0 = as_vector(x0, "x0", cfg.ambient_dim);
    } else if (!(x0.is_string() && x0.get<std::string>() == "random")) {
      throw ConfigError("x0", "expected a vector or \"random\"");
    }
  }

  const json& methods = require(root, "", "methods");
  if (!methods.is_array() || methods.empty()) throw ConfigError("methods", "expected a nonempty list");
  std::set<std::string> names;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    MethodEntry m = as_method(methods[i], at("methods", i), cfg.ambient_dim, cfg.subspaces);
    if (!names.insert(m.name).second) throw ConfigError(at(at("methods", i), "name"), "duplicate name");
    cfg.methods.push_back(std::move(m));
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace circa
