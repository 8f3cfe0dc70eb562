#include <gtest/gtest.h>

#include <cmath>

#include "circa/errors.hpp"
#include "circa/methods.hpp"
#include "circa/random.hpp"
#include "circa/rates.hpp"
#include "support/oracles.hpp"

using circa::AffineIsometry;
using circa::AffineMap;
using circa::AffineSubspace;
using circa::Matrix;
using circa::Vector;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

std::vector<AffineSubspace> family(circa::Rng& rng, Eigen::Index n, int m, Eigen::Index common,
                                   Eigen::Index extra, std::vector<Matrix>* spans = nullptr) {
  const Matrix shared = oracle::random_span(rng, n, common);
  std::vector<AffineSubspace> us;
  for (int i = 0; i < m; ++i) {
    Matrix s(n, common + extra);
    s << shared, oracle::random_span(rng, n, extra);
    if (spans) spans->push_back(s);
    us.push_back(AffineSubspace::linear_span(s));
  }
  return us;
}

circa::IterationTrace trace_of(std::vector<double> errors, Vector origin) {
  circa::IterationTrace t;
  t.errors = std::move(errors);
  t.origin = std::move(origin);
  t.origin_error = t.errors.front();
  return t;
}

}  // namespace

TEST(FriedrichsCos, Examples) {
  const auto x_axis = AffineSubspace::linear_span(v2(1, 0));
  const auto y_axis = AffineSubspace::linear_span(v2(0, 1));
  const auto diag = AffineSubspace::linear_span(v2(1, 1));
  EXPECT_NEAR(circa::friedrichs_cos(x_axis, x_axis), 0.0, 1e-15);
  EXPECT_NEAR(circa::friedrichs_cos(x_axis, y_axis), 0.0, 1e-15);
  EXPECT_NEAR(circa::friedrichs_cos(x_axis, diag), std::sqrt(0.5), 1e-12);
  const auto affine = AffineSubspace::from_span(v2(0, 1), Matrix(v2(1, 0)));
  EXPECT_THROW(circa::friedrichs_cos(affine, x_axis), circa::PreconditionViolation);
}

TEST(FriedrichsCos, SymmetricAndMatchesSecondForm) {
  circa::Rng rng(601);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Matrix> spans;
    const auto us = family(rng, 6, 2, rng.uniform_int(0, 2), 2, &spans);
    const double c = circa::friedrichs_cos(us[0], us[1]);
    EXPECT_NEAR(c, circa::friedrichs_cos(us[1], us[0]), 1e-10);
    // ||P_V P_U - P_{U cap V}||
    const Matrix pu = oracle::projector(spans[0]);
    const Matrix pv = oracle::projector(spans[1]);
    const Matrix pw = oracle::intersection_projector(spans);
    EXPECT_NEAR(c, oracle::spectral_norm(pv * pu - pw), 1e-9);
    EXPECT_GE(c, 0.0);
    EXPECT_LT(c, 1.0);
  }
}

TEST(TupleAngleCos, Examples) {
  circa::Rng rng(602);
  const std::vector<AffineSubspace> one = {AffineSubspace::linear_span(oracle::random_span(rng, 4, 2))};
  EXPECT_NEAR(circa::tuple_angle_cos(one), 0.0, 1e-14);

  const auto pair = family(rng, 5, 2, 1, 1);
  EXPECT_NEAR(circa::tuple_angle_cos(pair), circa::friedrichs_cos(pair[0], pair[1]), 1e-15);

  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Matrix> spans;
    for (int i = 0; i < 3; ++i) spans.push_back(oracle::random_span(rng, 3, 1));
    std::vector<AffineSubspace> lines;
    for (const auto& s : spans) lines.push_back(AffineSubspace::linear_span(s));
    const double g = circa::tuple_angle_cos(lines);
    const Matrix product = oracle::projector(spans[2]) * oracle::projector(spans[1]) * oracle::projector(spans[0]);
    const Matrix perp = Matrix::Identity(3, 3) - oracle::intersection_projector(spans);
    EXPECT_NEAR(g, oracle::spectral_norm(product * perp), 1e-10);
    EXPECT_GE(g, 0.0);
    EXPECT_LT(g, 1.0);
  }
  EXPECT_THROW(circa::tuple_angle_cos({}), circa::PreconditionViolation);
}

TEST(TupleAngleCos, SymmetricListSquares) {
  circa::Rng rng(603);
  for (int trial = 0; trial < 50; ++trial) {
    const auto us = family(rng, 7, static_cast<int>(rng.uniform_int(2, 4)), 1, 3);
    const double g = circa::tuple_angle_cos(us);
    EXPECT_NEAR(circa::tuple_angle_cos(circa::symmetric_list(us)), g * g, 1e-8);
  }
}

TEST(OperatorRate, Examples) {
  circa::Rng rng(604);
  const auto w = AffineSubspace::linear_span(oracle::random_span(rng, 4, 2));
  EXPECT_NEAR(circa::operator_rate(AffineMap::projector(w), w), 0.0, 1e-14);

  const Matrix half = 0.5 * Matrix::Identity(2, 2) + 0.5 * (-Matrix::Identity(2, 2));
  EXPECT_NEAR(circa::operator_rate(AffineMap(half), AffineSubspace::zero(2)), 0.0, 0.0);

  const auto u1 = AffineSubspace::linear_span(v2(1, 0));
  const auto u2 = AffineSubspace::linear_span(v2(1, 1));
  const AffineMap dr = circa::douglas_rachford_operator(u1, u2);
  ASSERT_TRUE(dr.is_normal());
  const auto fix = circa::fixed_point_set(dr);
  const double rate = circa::operator_rate(dr, *fix);
  // Second route: for normal T, ||T P_perp|| = sqrt(lambda_max((T P_perp)^T (T P_perp))).
  const Matrix tp = dr.linear() * (Matrix::Identity(2, 2) - fix->direction_projector());
  const auto ext = circa::sym_eigen_extremes(tp.transpose() * tp);
  EXPECT_NEAR(rate, std::sqrt(ext.lambda_max), 1e-12);
  EXPECT_NEAR(rate, std::sqrt(0.5), 1e-12);

  EXPECT_THROW(circa::operator_rate(AffineMap(0.5 * Matrix::Identity(2, 2)), u1), circa::PreconditionViolation);
  EXPECT_THROW(circa::operator_rate(AffineMap(Matrix::Identity(2, 2), v2(1, 0)), u1),
               circa::PreconditionViolation);
}

TEST(OperatorRate, AveragedBuildersContract) {
  circa::Rng rng(605);
  for (int trial = 0; trial < 100; ++trial) {
    const auto us = family(rng, 10, static_cast<int>(rng.uniform_int(2, 4)), rng.uniform_int(0, 2), 4);
    std::vector<AffineIsometry> fs = {AffineIsometry::identity(10)};
    for (const auto& u : us) fs.push_back(circa::make_reflector(u));
    const auto spec = circa::AveragedSpec::uniform(fs.size());
    for (const auto& a : {circa::build_sum_averaged(spec, fs), circa::build_product_averaged(spec, fs)}) {
      const auto fix = circa::fixed_point_set(a.map);
      ASSERT_TRUE(fix.has_value());
      EXPECT_LT(circa::operator_rate(a.map, *fix), 1.0);
    }
  }
}

TEST(OperatorRate, NormalPowers) {
  circa::Rng rng(606);
  for (int trial = 0; trial < 30; ++trial) {
    const auto us = family(rng, 6, 2, 1, 2);
    const AffineMap t = circa::douglas_rachford_operator(us[0], us[1]);
    ASSERT_TRUE(t.is_normal(circa::Tolerance{1e-10, 1e-8, 1e-12}));
    const auto fix = circa::fixed_point_set(t);
    const double rate = circa::operator_rate(t, *fix);
    const Matrix tp = t.linear() * (Matrix::Identity(6, 6) - fix->direction_projector());
    Matrix power = Matrix::Identity(6, 6);
    for (int k = 1; k <= 5; ++k) {
      power = power * tp;
      EXPECT_NEAR(oracle::spectral_norm(power), std::pow(rate, k), 1e-8);
    }
  }
}

TEST(AccelConstants, Examples) {
  const auto id = circa::accel_constants(AffineMap::identity(3));
  EXPECT_EQ(id.c1, 0.0);
  EXPECT_EQ(id.c2, 0.0);
  EXPECT_EQ(id.eta, 0.0);
  EXPECT_EQ(id.c_t, 0.0);

  const std::vector<AffineSubspace> us = {AffineSubspace::linear_span(v2(1, 0)),
                                          AffineSubspace::linear_span(v2(1, 1))};
  const auto k = circa::accel_constants(circa::symmetric_projection_product(us));
  const double g = circa::friedrichs_cos(us[0], us[1]);
  EXPECT_NEAR(k.c_t, g * g, 1e-12);
  EXPECT_NEAR(k.c_t, 0.5, 1e-12);
  EXPECT_LE(k.eta, 1.0 / 3.0 + 1e-12);
  EXPECT_GE(k.eta, 0.0);

  Matrix flip(2, 2);
  flip << 0, 1, 1, 0;
  EXPECT_THROW(circa::accel_constants(AffineMap(flip)), circa::PreconditionViolation);
  Matrix shear(2, 2);
  shear << 0.5, 0.2, 0.0, 0.5;
  EXPECT_THROW(circa::accel_constants(AffineMap(shear)), circa::PreconditionViolation);
  EXPECT_THROW(circa::accel_constants(AffineMap(1.5 * Matrix::Identity(2, 2))), circa::PreconditionViolation);
}

TEST(AccelConstants, TopEigenvalueEqualsNormOnSymmetricProducts) {
  circa::Rng rng(607);
  for (int trial = 0; trial < 100; ++trial) {
    const auto us = family(rng, 8, static_cast<int>(rng.uniform_int(2, 4)), 1, 3);
    const AffineMap t = circa::symmetric_projection_product(us);
    const auto k = circa::accel_constants(t);
    EXPECT_NEAR(k.c2, k.c_t, 1e-8);
    EXPECT_GE(k.c1, -1e-10);
    // eta^k c(T) <= gamma^(2(k+1)) with gamma the half-product tuple angle.
    const double g = circa::tuple_angle_cos(us);
    for (int j = 0; j <= 50; ++j) {
      EXPECT_LE(std::pow(k.eta, j) * k.c_t, std::pow(g, 2 * (j + 1)) * (1.0 + 1e-8) + 1e-300);
    }
  }
}

TEST(AuditBound, Examples) {
  const auto zero = circa::audit_bound(trace_of({0.0, 0.0, 0.0}, Vector::Zero(2)), 0.5);
  EXPECT_TRUE(zero.all_satisfied());
  EXPECT_EQ(zero.slack_min, 1.0);
  EXPECT_EQ(zero.floor, circa::kAuditFloor);

  const auto ok = circa::audit_bound(trace_of({1.0, 0.5, 0.25, 0.125}, Vector::Zero(2)), 0.5);
  EXPECT_TRUE(ok.all_satisfied());
  ASSERT_EQ(ok.per_iteration.size(), 4u);
  EXPECT_EQ(ok.per_iteration[3].bound, 0.125);

  const auto bad = circa::audit_bound(trace_of({1.0, 0.6}, Vector::Zero(2)), 0.5);
  EXPECT_FALSE(bad.all_satisfied());
  EXPECT_LT(bad.slack_min, 0.0);

  circa::IterationTrace pre = trace_of({0.5, 0.1}, Vector::Zero(2));
  pre.origin_error = 2.0;
  const auto scaled = circa::audit_bound(pre, 0.2, circa::ScaleMode::prefixed(0.25), "eta");
  EXPECT_EQ(scaled.per_iteration[0].bound, 0.5);
  EXPECT_DOUBLE_EQ(scaled.per_iteration[1].bound, 0.1);
  EXPECT_TRUE(scaled.all_satisfied());
  EXPECT_EQ(scaled.constant_name, "eta");

  EXPECT_THROW(circa::audit_bound(circa::IterationTrace{}, 0.5), circa::PreconditionViolation);
  EXPECT_THROW(circa::audit_bound(trace_of({1.0}, Vector::Zero(1)), -0.1), circa::PreconditionViolation);
}

TEST(AuditBound, FortyFiveDegreeTraces) {
  const std::vector<AffineSubspace> us = {AffineSubspace::linear_span(v2(1, 0)),
                                          AffineSubspace::linear_span(v2(1, 1))};
  std::vector<AffineIsometry> rs;
  for (const auto& u : us) rs.push_back(circa::make_reflector(u));
  const circa::OperatorSet psi = circa::build_psi(rs);
  circa::MethodConfig cfg;
  cfg.max_iters = 30;
  circa::Rng rng(608);
  for (int i = 0; i < 20; ++i) {
    const Vector x = rng.gaussian_vector(2);
    const auto crm = circa::run_cim(psi, x, cfg);
    EXPECT_TRUE(circa::audit_bound(crm, 0.5).all_satisfied());
    // After the first sweep, MAP iterates lie on U2 and contract by cos^2.
    cfg.prefix = circa::projection_product(us);
    const auto map = circa::run_map(us, x, cfg);
    cfg.prefix.reset();
    EXPECT_TRUE(circa::audit_bound(map, 0.5).all_satisfied());
  }
}

TEST(AuditBound, CsvLayout) {
  const auto r = circa::audit_bound(trace_of({1.0, 0.5}, Vector::Zero(1)), 0.5);
  const std::string csv = circa::report_to_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "k,error,bound,slack");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}
