#ifndef CIRCA_BENCH_HPP
#define CIRCA_BENCH_HPP

// Experiment harness: config parsing, seeded instances, method runs with
// bound audits, and report emission.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "circa/circumcenter.hpp"
#include "circa/errors.hpp"
#include "circa/isometry.hpp"
#include "circa/methods.hpp"
#include "circa/rates.hpp"
#include "circa/subspace.hpp"

namespace circa {

/// Malformed config. `where()` is a field path ("methods[2].prefix") or a
/// "line L, column C" position for syntax errors.
class ConfigError : public Error {
 public:
  ConfigError(std::string where, const std::string& what)
      : Error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

struct RandomInstanceSpec {
  Eigen::Index ambient_dim = 0;
  /// Number of subspaces.
  std::size_t count = 0;
  Eigen::Index dim_lo = 1;
  Eigen::Index dim_hi = 1;
  /// Dimension of a shared random subspace contained in every U_i.
  Eigen::Index common_dim = 0;
  std::optional<std::uint64_t> seed;

  void validate() const;
};

struct Instance {
  std::vector<AffineSubspace> subspaces;
  AffineSubspace intersection = AffineSubspace::zero(0);
  Vector x0;
  /// Draws used (1 when the first draw was accepted).
  std::size_t attempts = 1;
};

/// Maximum number of draws before generate_instance gives up.
inline constexpr std::size_t kMaxInstanceAttempts = 100;
/// Required distance of x0 from the intersection.
inline constexpr double kMinStartDistance = 0.1;

/// Random linear subspaces with dimensions drawn from [dim_lo, dim_hi] and
/// orthonormalized Gaussian bases, plus x0 on the unit sphere with
/// ||x0 - P x0|| > kMinStartDistance. Throws Error after
/// kMaxInstanceAttempts rejected draws.
Instance generate_instance(const RandomInstanceSpec& spec, std::uint64_t seed);

enum class Recipe { psi, identity_plus_reflectors, identity_plus_prefix_products, custom };
enum class PrefixKind { none, projection_product, symmetric_product };
enum class AveragedForm { sum, product };

std::string_view to_string(Recipe r) noexcept;
std::string_view to_string(PrefixKind p) noexcept;
std::string_view to_string(AveragedForm f) noexcept;

struct MethodEntry {
  std::string name;
  Method method = Method::cim;
  Recipe recipe = Recipe::psi;
  /// Use (U_1, ..., U_n, ..., U_1) in place of the subspace list.
  bool symmetric = false;
  PrefixKind prefix = PrefixKind::none;
  AveragedForm form = AveragedForm::sum;
  /// Operators of a custom operator set.
  std::vector<AffineIsometry> operators;
  std::vector<std::string> operator_labels;
  std::optional<std::size_t> max_iters;
};

struct ExperimentConfig {
  std::string name = "experiment";
  Eigen::Index ambient_dim = 0;
  std::uint64_t seed = 0;
  std::size_t max_iters = 30;
  double stop_tol = 0.0;
  std::string output_dir = "out";
  std::vector<AffineSubspace> subspaces;
  std::optional<RandomInstanceSpec> random;
  std::optional<Vector> x0;
  std::vector<MethodEntry> methods;
};

/// Parses the JSON config format documented in the README.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Subspaces and starting point of a config: explicit literals, or a
/// generated instance.
Instance resolve_instance(const ExperimentConfig& cfg);

/// Theoretical constant used to audit one method.
struct RateSpec {
  std::string constant_name;
  double value = 0.0;
  ScaleMode scale;
  std::vector<std::pair<std::string, double>> ingredients;
};

/// Rate applicable to `entry` on `inst`; empty when no bound is known
/// (custom operator sets without Id).
std::optional<RateSpec> theoretical_rate(const MethodEntry& entry, const Instance& inst);

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct MethodResult {
  std::string name;
  std::string method;
  std::optional<IterationTrace> trace;
  std::optional<RateReport> audit;
  std::vector<CheckResult> checks;
  /// Nonempty when the run threw.
  std::string error;

  bool ok() const;
};

struct ExperimentReport {
  std::string config_name;
  std::uint64_t seed = 0;
  Instance instance;
  std::vector<MethodResult> methods;

  bool ok() const;
};

struct RunOptions {
  /// Adds the invariant checks (firm quasinonexpansiveness, projection
  /// invariance, finiteness) to every trace.
  bool verify = false;
};

ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

enum class OutputFormat { csv, json };

/// JSON report. With OutputFormat::json the per-iteration trace and audit
/// rows are embedded; with csv they are referenced by file name.
std::string report_to_json(const ExperimentReport& report, OutputFormat format);

/// JSON listing of every method's theoretical constant (no iteration).
std::string rates_to_json(const ExperimentConfig& cfg);

/// Writes report.json (and per-method CSVs for OutputFormat::csv) into
/// `dir`, each file via a temporary name and a rename.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir,
                  OutputFormat format);

/// Writes `content` to `path` through `path.tmp` + rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Built-in configs used by the `demo` verb: (name, JSON text).
std::vector<std::pair<std::string, std::string>> demo_configs();

}  // namespace circa

#endif  // CIRCA_BENCH_HPP
