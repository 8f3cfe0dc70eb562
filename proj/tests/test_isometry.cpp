#include <gtest/gtest.h>

#include <cmath>

#include "circa/errors.hpp"
#include "circa/isometry.hpp"
#include "circa/random.hpp"
#include "support/oracles.hpp"

using circa::AffineIsometry;
using circa::AffineMap;
using circa::AffineSubspace;
using circa::Matrix;
using circa::Vector;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

Matrix diag2(double a, double b) { return v2(a, b).asDiagonal(); }

AffineSubspace line_through(const Vector& anchor, const Vector& dir) {
  return AffineSubspace::from_span(anchor, Matrix(dir));
}

double max_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

void expect_isometry(const AffineIsometry& t, circa::Rng& rng) {
  const Eigen::Index n = t.dim();
  EXPECT_LE(max_diff(t.linear().transpose() * t.linear(), Matrix::Identity(n, n)), 1e-10);
  for (int i = 0; i < 100; ++i) {
    const Vector x = rng.gaussian_vector(n);
    const Vector y = rng.gaussian_vector(n);
    EXPECT_NEAR((t(x) - t(y)).norm(), (x - y).norm(), 1e-10 * (1.0 + (x - y).norm()));
  }
}

}  // namespace

TEST(MakeReflector, Examples) {
  const auto r = circa::make_reflector(AffineSubspace::linear_span(v2(1, 0)));
  EXPECT_LE(max_diff(r.linear(), diag2(1, -1)), 1e-15);
  EXPECT_LE(r.offset().norm(), 1e-15);
  EXPECT_TRUE(r.is_linear_reflector());

  // Probe the affine line y = 1 at two points and solve for (Q, b).
  const auto affine = circa::make_reflector(line_through(v2(0, 1), v2(1, 0)));
  const Vector b = affine(v2(0, 0));
  const Matrix q = (Matrix(2, 2) << affine(v2(1, 0)) - b, affine(v2(0, 1)) - b).finished();
  EXPECT_LE(max_diff(q, diag2(1, -1)), 1e-14);
  EXPECT_LE((b - v2(0, 2)).norm(), 1e-14);
  EXPECT_LE(max_diff(affine.linear(), diag2(1, -1)), 1e-14);
  EXPECT_LE((affine.offset() - v2(0, 2)).norm(), 1e-14);
  EXPECT_FALSE(affine.is_linear_reflector());

  const auto whole = circa::make_reflector(AffineSubspace::whole(3));
  EXPECT_LE(max_diff(whole.linear(), Matrix::Identity(3, 3)), 1e-15);
}

TEST(MakeTranslation, Examples) {
  const auto zero = circa::make_translation(Vector::Zero(2));
  EXPECT_LE(max_diff(zero.linear(), Matrix::Identity(2, 2)), 0.0);
  EXPECT_TRUE(zero.is_linear());
  const auto t = circa::make_translation(v2(1, 0));
  EXPECT_FALSE(circa::fixed_point_set(t).has_value());
  EXPECT_EQ(t(v2(2, 2)), v2(3, 2));
}

TEST(Compose, Examples) {
  circa::Rng rng(301);
  const auto t = AffineIsometry::orthogonal(oracle::random_orthogonal(rng, 3), rng.gaussian_vector(3));
  const auto same = circa::compose(AffineIsometry::identity(3), t);
  EXPECT_LE(max_diff(same.linear(), t.linear()), 1e-15);
  EXPECT_LE((same.offset() - t.offset()).norm(), 1e-15);

  const auto rx = circa::make_reflector(AffineSubspace::linear_span(v2(1, 0)));
  const auto ry = circa::make_reflector(AffineSubspace::linear_span(v2(0, 1)));
  const auto rot = circa::compose(ry, rx);
  EXPECT_LE(max_diff(rot.linear(), -Matrix::Identity(2, 2)), 1e-15);

  for (int i = 0; i < 20; ++i) {
    const auto a = circa::make_reflector(AffineSubspace::linear_span(oracle::random_span(rng, 4, 2)));
    const auto b = circa::make_reflector(AffineSubspace::linear_span(oracle::random_span(rng, 4, 1)));
    const auto c = circa::compose(b, a);
    EXPECT_NEAR(c.linear().determinant(), 1.0 * a.linear().determinant() * b.linear().determinant(), 1e-10);
    const Vector x = rng.gaussian_vector(4);
    EXPECT_LE((c(x) - b(a(x))).norm(), 1e-12 * (1.0 + x.norm()));
  }
  EXPECT_THROW(circa::compose(rx, AffineIsometry::identity(3)), circa::DimensionMismatch);
}

TEST(Compose, TwoReflectorsHaveDeterminantOne) {
  circa::Rng rng(302);
  for (int i = 0; i < 20; ++i) {
    const auto a = circa::make_reflector(AffineSubspace::linear_span(oracle::random_span(rng, 5, 3)));
    const auto b = circa::make_reflector(AffineSubspace::linear_span(oracle::random_span(rng, 5, 3)));
    EXPECT_NEAR(circa::compose(b, a).linear().determinant(), 1.0, 1e-10);
  }
}

TEST(FixedPointSet, ThreeLines) {
  const double s = 1.0 / std::sqrt(2.0);
  const std::vector<AffineIsometry> rs = {
      circa::make_reflector(AffineSubspace::linear_span(v2(1, 0))),
      circa::make_reflector(AffineSubspace::linear_span(v2(s, s))),
      circa::make_reflector(AffineSubspace::linear_span(v2(0, 1)))};
  const auto fix = circa::fixed_point_set(circa::compose_all(rs, 2));
  ASSERT_TRUE(fix.has_value());
  ASSERT_EQ(fix->dim(), 1);
  const Vector b = fix->basis().col(0);
  EXPECT_NEAR(std::abs(b.dot(v2(s, s))), 1.0, 1e-10);
  EXPECT_LE(fix->anchor().norm(), 1e-12);
}

TEST(FixedPointSet, IdentityAndDouglasRachford) {
  const auto id = circa::fixed_point_set(AffineIsometry::identity(3));
  ASSERT_TRUE(id.has_value());
  EXPECT_EQ(id->dim(), 3);

  const auto rx = circa::make_reflector(AffineSubspace::linear_span(v2(1, 0)));
  const auto ry = circa::make_reflector(AffineSubspace::linear_span(v2(0, 1)));
  const Matrix dr = 0.5 * (Matrix::Identity(2, 2) + ry.linear() * rx.linear());
  const auto fix = circa::fixed_point_set(AffineMap(dr));
  ASSERT_TRUE(fix.has_value());
  EXPECT_EQ(fix->dim(), 0);
  EXPECT_LE(fix->anchor().norm(), 1e-14);
}

TEST(LinearizeAbout, Examples) {
  circa::Rng rng(303);
  const auto r = circa::make_reflector(AffineSubspace::linear_span(oracle::random_span(rng, 3, 2)));
  const auto same = circa::linearize_about(r, Vector::Zero(3));
  EXPECT_LE(max_diff(same.linear(), r.linear()), 0.0);
  EXPECT_TRUE(same.is_linear());

  const auto affine = circa::make_reflector(line_through(v2(0, 1), v2(1, 0)));
  const auto f = circa::linearize_about(affine, v2(0, 1));
  const auto rx = circa::make_reflector(AffineSubspace::linear_span(v2(1, 0)));
  for (const Vector& probe : {v2(1, 0), v2(0, 1), v2(2, -3)}) {
    EXPECT_LE((f(probe) - rx(probe)).norm(), 1e-14);
    EXPECT_LE((f(probe) - (affine(probe + v2(0, 1)) - v2(0, 1))).norm(), 1e-14);
  }
  EXPECT_THROW(circa::linearize_about(affine, v2(0, 0)), circa::PreconditionViolation);
}

TEST(LinearizeAbout, FixedSetShiftsByZ) {
  circa::Rng rng(304);
  for (int i = 0; i < 50; ++i) {
    const auto s = AffineSubspace::from_span(rng.gaussian_vector(4), oracle::random_span(rng, 4, 2));
    const auto t = circa::make_reflector(s);
    const Vector z = s.project(rng.gaussian_vector(4));
    const auto fix_t = circa::fixed_point_set(t);
    const auto fix_f = circa::fixed_point_set(circa::linearize_about(t, z));
    ASSERT_TRUE(fix_t && fix_f);
    const AffineSubspace shifted(fix_t->anchor() - z, fix_t->basis());
    EXPECT_TRUE(circa::same_set(shifted, *fix_f));
  }
}

TEST(AveragedBuilders, Examples) {
  const std::vector<AffineIsometry> id = {AffineIsometry::identity(2)};
  auto spec = circa::AveragedSpec::uniform(1);
  EXPECT_LE(max_diff(circa::build_sum_averaged(spec, id).map.linear(), Matrix::Identity(2, 2)), 0.0);

  const std::vector<AffineIsometry> rx = {circa::make_reflector(AffineSubspace::linear_span(v2(1, 0)))};
  const auto a = circa::build_sum_averaged(spec, rx);
  EXPECT_LE(max_diff(a.map.linear(), diag2(1, 0)), 1e-15);
  EXPECT_DOUBLE_EQ(a.alpha, 0.5);

  const auto p = circa::build_product_averaged(spec, rx);
  EXPECT_LE(max_diff(p.map.linear(), a.map.linear()), 0.0);

  circa::Rng rng(305);
  const auto ru = circa::make_reflector(AffineSubspace::linear_span(oracle::random_span(rng, 3, 1)));
  const std::vector<AffineIsometry> pair = {AffineIsometry::identity(3), ru};
  circa::AveragedSpec custom;
  custom.weights = {0.3, 0.7};
  custom.alphas = {0.4, 0.6};
  custom.lambdas = {0.5, 0.2};
  const auto prod = circa::build_product_averaged(custom, pair);
  const Matrix id3 = Matrix::Identity(3, 3);
  const Matrix a1 = 0.6 * id3 + 0.4 * id3;
  const Matrix a2 = 0.4 * id3 + 0.6 * (0.8 * id3 + 0.2 * ru.linear());
  EXPECT_LE(max_diff(prod.map.linear(), 0.3 * a1 + 0.7 * a2), 1e-14);
  EXPECT_NEAR(prod.alpha, 0.3 * 0.4 + 0.7 * 0.6, 1e-15);
}

TEST(AveragedBuilders, RejectBadInput) {
  const std::vector<AffineIsometry> affine = {circa::make_translation(v2(1, 0))};
  EXPECT_THROW(circa::build_sum_averaged(circa::AveragedSpec::uniform(1), affine),
               circa::PreconditionViolation);
  const std::vector<AffineIsometry> two = {AffineIsometry::identity(2), AffineIsometry::identity(2)};
  EXPECT_THROW(circa::build_sum_averaged(circa::AveragedSpec::uniform(3), two),
               circa::PreconditionViolation);
  circa::AveragedSpec bad = circa::AveragedSpec::uniform(2);
  bad.alphas[0] = 1.0;
  EXPECT_THROW(circa::build_sum_averaged(bad, two), circa::PreconditionViolation);
  bad = circa::AveragedSpec::uniform(2);
  bad.weights = {0.5, 0.6};
  EXPECT_THROW(circa::build_product_averaged(bad, two), circa::PreconditionViolation);
}

TEST(AveragedBuilders, FixedSetIsCommonFixedSet) {
  circa::Rng rng(306);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 6;
    const Matrix common = oracle::random_span(rng, n, 1);
    std::vector<AffineIsometry> fs;
    std::vector<AffineSubspace> fixes;
    for (int i = 0; i < 3; ++i) {
      Matrix span(n, 3);
      span << common, oracle::random_span(rng, n, 2);
      const auto u = AffineSubspace::linear_span(span);
      fs.push_back(circa::make_reflector(u));
      fixes.push_back(u);
    }
    const auto w = circa::intersect(fixes);
    ASSERT_TRUE(w);
    const auto spec = circa::AveragedSpec::uniform(fs.size());
    for (const auto& a : {circa::build_sum_averaged(spec, fs), circa::build_product_averaged(spec, fs)}) {
      const auto fix = circa::fixed_point_set(a.map);
      ASSERT_TRUE(fix.has_value());
      EXPECT_TRUE(circa::same_set(*fix, *w.subspace));
      const Matrix perp = Matrix::Identity(n, n) - w.subspace->direction_projector();
      EXPECT_LT(oracle::spectral_norm(a.map.linear() * perp), 1.0);
    }
  }
}

TEST(AcceleratedApply, Examples) {
  const AffineMap id = AffineMap::identity(2);
  EXPECT_EQ(circa::accelerated_apply(id, v2(3, 4)), v2(3, 4));

  const AffineMap zero(Matrix::Zero(2, 2));
  EXPECT_LE(circa::accelerated_apply(zero, v2(1, 0)).norm(), 1e-15);

  // Two nonorthogonal lines through 0: A_T(Tx) = P_{Fix T} x = 0.
  const auto u1 = AffineSubspace::linear_span(v2(1, 0));
  const auto u2 = AffineSubspace::linear_span(v2(1, 2));
  const AffineMap t = circa::compose(AffineMap::projector(u2), AffineMap::projector(u1));
  circa::Rng rng(307);
  for (int i = 0; i < 20; ++i) {
    const Vector x = rng.gaussian_vector(2);
    EXPECT_LE(circa::accelerated_apply(t, t(x)).norm(), 1e-14 * (1.0 + x.norm()));
  }

  EXPECT_THROW(circa::accelerated_apply(AffineMap(2.0 * Matrix::Identity(2, 2)), v2(1, 0)),
               circa::PreconditionViolation);
  EXPECT_THROW(circa::accelerated_apply(AffineMap(Matrix::Identity(2, 2), v2(1, 0)), v2(1, 0)),
               circa::PreconditionViolation);
}

TEST(AcceleratedApply, FormulaOnRandomContractions) {
  circa::Rng rng(308);
  for (int i = 0; i < 50; ++i) {
    const Matrix g = rng.gaussian_matrix(4, 4);
    const Matrix t = g / (oracle::spectral_norm(g) * 1.01);
    const Vector x = rng.gaussian_vector(4);
    const Vector d = x - t * x;
    const double step = x.dot(d) / d.squaredNorm();
    const Vector expected = step * (t * x) + (1.0 - step) * x;
    EXPECT_LE((circa::accelerated_apply(AffineMap(t), x) - expected).norm(), 1e-12 * (1.0 + expected.norm()));
  }
}

class IsometryProperties : public ::testing::Test {
 protected:
  circa::Rng rng{309};
};

TEST_F(IsometryProperties, ConstructorsAreIsometries) {
  expect_isometry(circa::make_reflector(AffineSubspace::from_span(rng.gaussian_vector(5), oracle::random_span(rng, 5, 2))), rng);
  expect_isometry(circa::make_translation(rng.gaussian_vector(5)), rng);
  expect_isometry(AffineIsometry::orthogonal(oracle::random_orthogonal(rng, 5), rng.gaussian_vector(5)), rng);
  expect_isometry(circa::compose(circa::make_translation(rng.gaussian_vector(5)),
                                 AffineIsometry::orthogonal(oracle::random_orthogonal(rng, 5))),
                  rng);
  EXPECT_THROW(AffineIsometry::orthogonal(2.0 * Matrix::Identity(3, 3)), circa::PreconditionViolation);
}

TEST_F(IsometryProperties, SelfAdjointIsometryHalvesAreProjectors) {
  for (int i = 0; i < 50; ++i) {
    const Eigen::Index n = 5;
    const auto u = AffineSubspace::linear_span(oracle::random_span(rng, n, rng.uniform_int(0, n)));
    const auto t = circa::make_reflector(u);
    const Matrix q = t.linear();
    const auto fix = circa::fixed_point_set(t);
    ASSERT_TRUE(fix.has_value());
    const Matrix id = Matrix::Identity(n, n);
    EXPECT_LE(max_diff(0.5 * (id + q), fix->direction_projector()), 1e-10);
    EXPECT_LE(max_diff(0.5 * (id - q), circa::orthogonal_complement(*fix).direction_projector()), 1e-10);
    EXPECT_LE(max_diff(circa::make_reflector(*fix).linear(), q), 1e-10);
  }
}

TEST_F(IsometryProperties, FixedSetOfTwoSelfAdjointIsometries) {
  for (int i = 0; i < 50; ++i) {
    const Eigen::Index n = 6;
    const Matrix shared = oracle::random_span(rng, n, 1);
    Matrix s1(n, 3);
    Matrix s2(n, 3);
    s1 << shared, oracle::random_span(rng, n, 2);
    s2 << shared, oracle::random_span(rng, n, 2);
    const auto u1 = AffineSubspace::linear_span(s1);
    const auto u2 = AffineSubspace::linear_span(s2);
    const auto fix = circa::fixed_point_set(circa::compose(circa::make_reflector(u2), circa::make_reflector(u1)));
    ASSERT_TRUE(fix.has_value());
    const std::vector<AffineSubspace> both = {u1, u2};
    const std::vector<AffineSubspace> perps = {circa::orthogonal_complement(u1), circa::orthogonal_complement(u2)};
    const std::vector<AffineSubspace> parts = {*circa::intersect(both).subspace, *circa::intersect(perps).subspace};
    EXPECT_TRUE(circa::same_set(*fix, circa::linear_sum(parts)));
  }
}

TEST_F(IsometryProperties, ProjectorOntoFixedSubsetCommutes) {
  for (int i = 0; i < 50; ++i) {
    const Eigen::Index n = 5;
    const auto u = AffineSubspace::from_span(rng.gaussian_vector(n), oracle::random_span(rng, n, 3));
    const auto t = circa::make_reflector(u);
    // W: an affine subspace inside Fix T = U.
    const auto w = AffineSubspace::from_span(u.project(rng.gaussian_vector(n)),
                                             Matrix(u.basis().col(0) + 0.5 * u.basis().col(1)));
    const Vector x = rng.gaussian_vector(n);
    EXPECT_LE((t(w.project(x)) - w.project(x)).norm(), 1e-10 * (1.0 + x.norm()));
    EXPECT_LE((w.project(t(x)) - w.project(x)).norm(), 1e-10 * (1.0 + x.norm()));
  }
}

TEST_F(IsometryProperties, StepsAreOrthogonalToCommonFixedSet) {
  for (int i = 0; i < 50; ++i) {
    const Eigen::Index n = 6;
    const Matrix shared = oracle::random_span(rng, n, 2);
    std::vector<AffineSubspace> us;
    for (int j = 0; j < 3; ++j) {
      Matrix s(n, 3);
      s << shared, oracle::random_span(rng, n, 1);
      us.push_back(AffineSubspace::linear_span(s));
    }
    const auto w = circa::intersect(us);
    ASSERT_TRUE(w);
    const Vector x = rng.gaussian_vector(n);
    for (const auto& u : us) {
      const Vector step = circa::make_reflector(u)(x) - x;
      for (Eigen::Index c = 0; c < w.subspace->dim(); ++c) {
        EXPECT_LE(std::abs(step.dot(w.subspace->basis().col(c))), 1e-10 * (1.0 + x.norm()));
      }
    }
  }
}

TEST(AffineMapTest, Predicates) {
  const AffineMap p = AffineMap::projector(AffineSubspace::linear_span(v2(1, 1)));
  EXPECT_TRUE(p.is_linear());
  EXPECT_TRUE(p.is_self_adjoint());
  EXPECT_TRUE(p.is_normal());
  Matrix shear(2, 2);
  shear << 1, 1, 0, 1;
  EXPECT_FALSE(AffineMap(shear).is_normal());
  EXPECT_FALSE(AffineMap(shear).is_self_adjoint());
  EXPECT_THROW(AffineMap(Matrix::Zero(2, 3), Vector::Zero(2)), circa::DimensionMismatch);
}
