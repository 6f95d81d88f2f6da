#include "homlab/control.hpp"
#include "homlab/drift.hpp"
#include "homlab/errors.hpp"
#include "homlab/media.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace homlab;

namespace {

struct Named {
  std::string name;
  MediumInstance medium;
};

std::vector<Named> smooth_media() {
  Mat sigma(2, 2);
  sigma << 1.0, 0.5, 0.0, 2.0;
  Mat H(2, 2);
  H << 0.0, 0.3, -0.3, 0.0;
  return {
      {"periodic identity", make_periodic_medium(1.0, {})},
      {"periodic rotation", make_periodic_medium(1.0, {USpec::Kind::kRotation, 0.4})},
      {"periodic breathing", make_periodic_medium(2.0, {USpec::Kind::kBreathing, 0.5})},
      {"chessboard", make_chessboard_medium(0.5, {0.2, "bump"}, 17, {64, 64, 64}, false)},
      {"chessboard periodic", make_chessboard_medium(0.5, {0.25, "bump"}, 18, {4, 4, 4}, true)},
      {"constant", make_constant_medium(sigma, H, Vec::Zero(2))},
      {"periodic1d", make_periodic1d_medium(1.0, 0.5, 0.3)},
      {"elliptic2d", make_elliptic2d_medium(0.3, 0.5)},
  };
}

Vec random_point(std::mt19937_64& g, int d, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vec x(d);
  for (int i = 0; i < d; ++i) x(i) = u(g);
  return x;
}

PointEval eval(const MediumInstance& m, double t, const Vec& x) {
  PointEval p;
  m.evaluate(t, x, p);
  return p;
}

}  // namespace

TEST(Media, DiffusionIsSigmaSigmaTransposeAndHIsAntisymmetric) {
  std::mt19937_64 g(1);
  for (const auto& [name, m] : smooth_media()) {
    for (int k = 0; k < 50; ++k) {
      const double t = std::uniform_real_distribution<double>(-5, 5)(g);
      const auto p = eval(m, t, random_point(g, m.dim(), 5.0));
      EXPECT_LT((p.a - p.sigma * p.sigma.transpose()).cwiseAbs().maxCoeff(), 1e-12) << name;
      EXPECT_LT(antisymmetry_defect(p.H), 1e-14) << name;
      for (int j = 0; j < m.dim(); ++j) EXPECT_LT(antisymmetry_defect(p.grad_H[j]), 1e-14) << name;
    }
  }
}

// Every derivative the drift uses against central differences of the field itself.
TEST(Media, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 g(2);
  const double h = 1e-6;
  for (const auto& [name, m] : smooth_media()) {
    const int d = m.dim();
    for (int k = 0; k < 30; ++k) {
      const double t = std::uniform_real_distribution<double>(-5, 5)(g);
      const Vec x = random_point(g, d, 5.0);
      const auto p = eval(m, t, x);
      const double tol = 1e-5 * std::max(1.0, p.a.cwiseAbs().maxCoeff());
      const auto pt = eval(m, t + h, x), mt = eval(m, t - h, x);
      EXPECT_LT((p.dt_a - (pt.a - mt.a) / (2 * h)).cwiseAbs().maxCoeff(), tol) << name;
      EXPECT_LT((p.dt_H - (pt.H - mt.H) / (2 * h)).cwiseAbs().maxCoeff(), tol) << name;
      for (int j = 0; j < d; ++j) {
        Vec xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        const auto pp = eval(m, t, xp), pm = eval(m, t, xm);
        EXPECT_LT((p.grad_a[j] - (pp.a - pm.a) / (2 * h)).cwiseAbs().maxCoeff(), tol) << name << " j=" << j;
        EXPECT_LT((p.grad_H[j] - (pp.H - pm.H) / (2 * h)).cwiseAbs().maxCoeff(), tol) << name << " j=" << j;
        EXPECT_NEAR(p.grad_V(j), (pp.V - pm.V) / (2 * h), 1e-6) << name;
      }
    }
  }
}

// b_i = sum_j (1/2 D_j a_ij - a_ij D_j V + 1/2 D_j H_ij) from finite differences.
TEST(Media, DriftMatchesFiniteDifferenceOracle) {
  std::mt19937_64 g(3);
  const double h = 1e-5;
  for (const auto& [name, m] : smooth_media()) {
    const int d = m.dim();
    for (int k = 0; k < 20; ++k) {
      const double t = std::uniform_real_distribution<double>(-5, 5)(g);
      const Vec x = random_point(g, d, 5.0);
      const auto p = eval(m, t, x);
      Vec b = Vec::Zero(d);
      for (int j = 0; j < d; ++j) {
        Vec xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        const auto pp = eval(m, t, xp), pm = eval(m, t, xm);
        const double dV = (pp.V - pm.V) / (2 * h);
        for (int i = 0; i < d; ++i)
          b(i) += 0.5 * (pp.a(i, j) - pm.a(i, j)) / (2 * h) - p.a(i, j) * dV + 0.5 * (pp.H(i, j) - pm.H(i, j)) / (2 * h);
      }
      EXPECT_LT((drift(m, t, x) - b).cwiseAbs().maxCoeff(), 1e-5 * std::max(1.0, b.cwiseAbs().maxCoeff())) << name;
    }
  }
}

TEST(Media, ShiftedInstanceReadsTheShiftedPoint) {
  std::mt19937_64 g(4);
  for (const auto& [name, m] : smooth_media()) {
    const int d = m.dim();
    const double s = 1.25;
    const Vec y = random_point(g, d, 3.0);
    const auto shifted = m.shifted(s, y);
    const auto twice = shifted.shifted(-0.5, y);
    for (int k = 0; k < 10; ++k) {
      const double t = std::uniform_real_distribution<double>(-3, 3)(g);
      const Vec x = random_point(g, d, 3.0);
      const auto a = eval(shifted, t, x);
      const auto b = eval(m, t + s, x + y);
      EXPECT_EQ(a.sigma, b.sigma) << name;
      EXPECT_EQ(a.H, b.H) << name;
      EXPECT_EQ(a.V, b.V) << name;
      const auto c = eval(twice, t, x);
      const auto e = eval(m, t + s - 0.5, x + 2 * y);
      EXPECT_LT((c.a - e.a).cwiseAbs().maxCoeff(), 1e-12) << name;
    }
  }
}

TEST(Media, PeriodicMediumVanishesOnTheCellBoundary) {
  const auto m = make_periodic_medium(1.0, {USpec::Kind::kRotation, 0.3});
  for (double y : {0.0, 1.0, 2.5}) {
    const auto p = eval(m, 0.7, (Vec(2) << 0.0, y).finished());
    EXPECT_LT(p.sigma.cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT(drift(m, 0.7, (Vec(2) << 2 * M_PI, y).finished()).norm(), 1e-12);
  }
  const auto p = eval(m, 0.0, (Vec(2) << M_PI, M_PI).finished());
  // s = (1 - cos x)(1 - cos y) = 4 at the cell centre.
  EXPECT_NEAR(p.sigma.determinant(), 16.0, 1e-12);
}

TEST(Media, ConstructionRejectsInvalidParameters) {
  EXPECT_THROW(make_periodic_medium(0.5, {}), ConfigError);
  EXPECT_THROW(make_periodic_medium(2.0, {USpec::Kind::kBreathing, 1.0}), ConfigError);
  // U U^T = (1 + 0.9 sin) Id leaves [1/alpha, alpha] for alpha = 1.5.
  EXPECT_THROW(make_periodic_medium(1.5, {USpec::Kind::kBreathing, 0.9}), ConfigError);
  EXPECT_THROW(USpec::parse_kind("shear"), ConfigError);
  EXPECT_THROW(make_chessboard_medium(1.5, {}, 0, {8, 8, 8}, false), ConfigError);
  EXPECT_THROW(make_periodic1d_medium(1.0, 1.0, 0.0), ConfigError);
  EXPECT_THROW(make_elliptic2d_medium(1.0, 0.0), ConfigError);

  Mat singular(2, 2);
  singular << 1.0, 0.0, 0.0, 0.0;
  Mat H(2, 2);
  H << 0.0, 1.0, -1.0, 0.0;
  EXPECT_THROW(make_constant_medium(singular, H, Vec::Zero(2)), ConfigError);
  Mat not_antisymmetric(2, 2);
  not_antisymmetric << 0.0, 1.0, 1.0, 0.0;
  EXPECT_THROW(make_constant_medium(Mat::Identity(2, 2), not_antisymmetric, Vec::Zero(2)), ConfigError);
}

TEST(Media, ChessboardCoefficientsFollowTheStripes) {
  const auto m = make_chessboard_medium(0.5, {0.2, "bump"}, 21, {64, 64, 64}, false);
  const auto* cb = as_chessboard(m);
  ASSERT_NE(cb, nullptr);
  EXPECT_EQ(as_chessboard(make_constant_medium(Mat::Identity(2, 2))), nullptr);
  std::mt19937_64 g(5);
  for (int k = 0; k < 50; ++k) {
    const double t = std::uniform_real_distribution<double>(-10, 10)(g);
    const Vec x = random_point(g, 2, 10.0);
    const auto p = eval(m, t, x);
    const double alpha1 = cb->stripe(1).value(x(0));
    const double beta = cb->stripe(0).value(t);
    EXPECT_DOUBLE_EQ(p.sigma(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(p.sigma(1, 1), alpha1);
    EXPECT_DOUBLE_EQ(p.H(0, 1), alpha1 * alpha1 * beta);
    EXPECT_DOUBLE_EQ(p.H(1, 0), -alpha1 * alpha1 * beta);
  }
}

TEST(Control, ShippedMediaSatisfyTheirConstants) {
  for (const auto& [name, m] : smooth_media()) {
    const auto report = validate_control(m, m.field().control_constants(), SampleGrid::for_medium(m, 10));
    EXPECT_TRUE(report.passed) << name;
    EXPECT_GT(report.points, 0u);
    for (const auto& margin : report.margins) EXPECT_GE(margin.margin, -1e-10) << name << ": " << margin.name;
  }
}

TEST(Control, UnderstatedConstantsAreReported) {
  const auto m = make_elliptic2d_medium(0.3, 0.5);
  auto c = m.field().control_constants();
  c.m = 0.9;  // a >= (1 - kappa)^2 a~ only
  auto report = validate_control(m, c, SampleGrid::for_medium(m, 10));
  EXPECT_FALSE(report.passed);

  c = m.field().control_constants();
  c.C1_H = 0.1;
  report = validate_control(m, c, SampleGrid::for_medium(m, 10));
  EXPECT_FALSE(report.passed);
  EXPECT_GE(report.estimated.C1_H, 0.45);
}

TEST(Control, ChessboardConstants) {
  const auto m = make_chessboard_medium(0.5, {0.2, "bump"}, 3, {64, 64, 64}, false);
  const auto c = m.field().control_constants();
  EXPECT_EQ(c.m, 1.0);
  EXPECT_EQ(c.M, 1.0);
  EXPECT_EQ(c.C1_H, 1.0);
  const auto report = validate_control(m, c, SampleGrid::for_medium(m, 14));
  EXPECT_TRUE(report.passed);
  EXPECT_LE(report.estimated.C1_H, 1.0 + 1e-12);
}

TEST(Control, DirectionSetsAreUnitVectors) {
  EXPECT_EQ(direction_set(1).size(), 1u);
  EXPECT_EQ(direction_set(2).size(), 64u);
  EXPECT_EQ(direction_set(3).size(), 128u);
  for (int d = 1; d <= 3; ++d)
    for (const auto& v : direction_set(d)) EXPECT_NEAR(v.norm(), 1.0, 1e-14);
}
