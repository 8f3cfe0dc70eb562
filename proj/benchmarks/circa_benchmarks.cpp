#include <benchmark/benchmark.h>

#include "circa/bench.hpp"
#include "circa/random.hpp"

namespace {

circa::Instance instance(Eigen::Index n, std::size_t m) {
  circa::RandomInstanceSpec spec;
  spec.ambient_dim = n;
  spec.count = m;
  spec.dim_lo = n / 2;
  spec.dim_hi = n - 1;
  spec.common_dim = 1;
  return circa::generate_instance(spec, 11);
}

std::vector<circa::AffineIsometry> reflectors(const circa::Instance& inst) {
  std::vector<circa::AffineIsometry> out;
  for (const auto& u : inst.subspaces) out.push_back(circa::make_reflector(u));
  return out;
}

void BM_Circumcenter(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  circa::Rng rng(5);
  std::vector<circa::Vector> pts;
  for (int i = 0; i < 5; ++i) pts.push_back(rng.gaussian_vector(n));
  for (auto _ : state) benchmark::DoNotOptimize(circa::circumcenter(pts));
}
BENCHMARK(BM_Circumcenter)->Arg(5)->Arg(20)->Arg(100);

void BM_CircumcenterMapPsi(benchmark::State& state) {
  const auto inst = instance(static_cast<Eigen::Index>(state.range(0)), 3);
  const auto refl = reflectors(inst);
  const circa::OperatorSet psi = circa::build_psi(refl);
  for (auto _ : state) benchmark::DoNotOptimize(circa::circumcenter_map(psi, inst.x0));
}
BENCHMARK(BM_CircumcenterMapPsi)->Arg(10)->Arg(50);

void BM_RunMethod(benchmark::State& state, circa::Method method) {
  const auto inst = instance(10, 3);
  const auto refl = reflectors(inst);
  const circa::OperatorSet psi = circa::build_psi(refl);
  circa::MethodConfig cfg;
  cfg.method = method;
  cfg.max_iters = 30;
  for (auto _ : state) {
    switch (method) {
      case circa::Method::cim: benchmark::DoNotOptimize(circa::run_cim(psi, inst.x0, cfg)); break;
      case circa::Method::map: benchmark::DoNotOptimize(circa::run_map(inst.subspaces, inst.x0, cfg)); break;
      case circa::Method::accel_map: benchmark::DoNotOptimize(circa::run_accel(inst.subspaces, inst.x0, cfg)); break;
      default: break;
    }
  }
}
BENCHMARK_CAPTURE(BM_RunMethod, crm_psi, circa::Method::cim);
BENCHMARK_CAPTURE(BM_RunMethod, map, circa::Method::map);
BENCHMARK_CAPTURE(BM_RunMethod, accel, circa::Method::accel_map);

void BM_TupleAngle(benchmark::State& state) {
  const auto inst = instance(static_cast<Eigen::Index>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(circa::tuple_angle_cos(inst.subspaces));
}
BENCHMARK(BM_TupleAngle)->Arg(10)->Arg(50)->Arg(200);

void BM_AccelConstants(benchmark::State& state) {
  const auto inst = instance(static_cast<Eigen::Index>(state.range(0)), 3);
  const circa::AffineMap t = circa::symmetric_projection_product(inst.subspaces);
  for (auto _ : state) benchmark::DoNotOptimize(circa::accel_constants(t));
}
BENCHMARK(BM_AccelConstants)->Arg(10)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
