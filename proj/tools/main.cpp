// circa: run, audit and verify circumcentered-method experiments.
//
//   circa run <config>     iterate every method, audit its bound, write traces
//   circa rates <config>   theoretical constants only
//   circa verify <config>  run + invariant checks; nonzero exit on violation
//   circa demo             45-degree lines and the R3 R2 R1 example
//
// Exit status: 0 all audits hold, 1 violation or failed run, 2 bad input.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "circa/bench.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> max_iters;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, Flags& f, bool with_config) {
  if (with_config) cmd->add_option("config", f.config, "Experiment config (JSON)")->required();
  cmd->add_option("--seed", f.seed, "Override the config seed");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--max-iters", f.max_iters, "Override max_iters for every method");
  cmd->add_option("--format", f.format, "Trace output format")
      ->check(CLI::IsMember({"csv", "json"}));
}

void apply_overrides(circa::ExperimentConfig& cfg, const Flags& f) {
  if (f.seed) {
    cfg.seed = *f.seed;
    if (cfg.random) cfg.random->seed = *f.seed;
  }
  if (f.out) cfg.output_dir = *f.out;
  if (f.max_iters) {
    cfg.max_iters = *f.max_iters;
    for (auto& m : cfg.methods) m.max_iters.reset();
  }
}

circa::OutputFormat format_of(const Flags& f) {
  return f.format == "json" ? circa::OutputFormat::json : circa::OutputFormat::csv;
}

std::string short_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void print_summary(const circa::ExperimentReport& r) {
  std::printf("%-28s %-14s %6s %-13s %-30s %-12s %s\n", "method", "kind", "iters", "final_error",
              "rate", "slack_min", "status");
  for (const auto& m : r.methods) {
    const std::string iters = m.trace ? std::to_string(m.trace->stopped_at) : "-";
    const std::string err = m.trace ? short_real(m.trace->errors.back()) : "-";
    const std::string rate =
        m.audit ? m.audit->constant_name + "=" + short_real(m.audit->value) : "-";
    const std::string slack = m.audit ? short_real(m.audit->slack_min) : "-";
    std::string status = m.ok() ? "ok" : (m.error.empty() ? "VIOLATED" : "ERROR");
    for (const auto& c : m.checks) {
      if (!c.passed) status += " [" + c.name + ": " + c.detail + "]";
    }
    if (!m.error.empty()) status += " (" + m.error + ")";
    std::printf("%-28s %-14s %6s %-13s %-30s %-12s %s\n", m.name.c_str(), m.method.c_str(),
                iters.c_str(), err.c_str(), rate.c_str(), slack.c_str(), status.c_str());
  }
}

int execute(circa::ExperimentConfig cfg, const Flags& f, bool verify) {
  apply_overrides(cfg, f);
  circa::RunOptions opts;
  opts.verify = verify;
  const circa::ExperimentReport report = circa::run_experiment(cfg, opts);
  circa::write_report(report, cfg.output_dir, format_of(f));
  std::printf("%s: seed %llu, %zu methods, output in %s\n", cfg.name.c_str(),
              static_cast<unsigned long long>(report.seed), report.methods.size(),
              cfg.output_dir.c_str());
  print_summary(report);
  return report.ok() ? 0 : 1;
}

int run_demo(const Flags& f) {
  int status = 0;
  const std::string base = f.out.value_or("out/demo");
  for (const auto& [name, text] : circa::demo_configs()) {
    circa::ExperimentConfig cfg = circa::parse_config(text);
    Flags local = f;
    local.out = base + "/" + name;
    status = std::max(status, execute(cfg, local, true));
    std::printf("\n");
  }

  const circa::Vector e1 = circa::Vector::Unit(2, 0);
  const circa::Vector e2 = circa::Vector::Unit(2, 1);
  const circa::Vector diag = (e1 + e2).normalized();
  const circa::AffineIsometry r[] = {
      circa::make_reflector(circa::AffineSubspace::linear_span(e1)),
      circa::make_reflector(circa::AffineSubspace::linear_span(diag)),
      circa::make_reflector(circa::AffineSubspace::linear_span(e2))};
  const auto fix = circa::fixed_point_set(circa::compose_all(r, 2));
  if (fix && fix->dim() == 1) {
    const circa::Vector b = fix->basis().col(0);
    std::printf("Fix R3 R2 R1 = span{(%s, %s)}\n", circa::format_real(b(0)).c_str(),
                circa::format_real(b(1)).c_str());
  } else {
    std::printf("Fix R3 R2 R1: unexpected dimension\n");
    status = 1;
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Circumcentered isometry methods: runs, rate audits, verification"};
  app.require_subcommand(1);
  Flags flags;

  auto* run = app.add_subcommand("run", "Run every method in a config and audit its bound");
  add_common(run, flags, true);
  auto* rates = app.add_subcommand("rates", "Print theoretical constants without iterating");
  add_common(rates, flags, true);
  auto* verify = app.add_subcommand("verify", "Run with the full audit suite");
  add_common(verify, flags, true);
  auto* demo = app.add_subcommand("demo", "Run the built-in demonstration instances");
  add_common(demo, flags, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (demo->parsed()) return run_demo(flags);
    circa::ExperimentConfig cfg = circa::load_config(flags.config);
    if (rates->parsed()) {
      apply_overrides(cfg, flags);
      const std::string text = circa::rates_to_json(cfg);
      if (flags.out) {
        std::filesystem::create_directories(*flags.out);
        circa::write_file_atomic(std::filesystem::path(*flags.out) / "rates.json", text);
      }
      std::cout << text;
      return 0;
    }
    return execute(std::move(cfg), flags, verify->parsed());
  } catch (const circa::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
