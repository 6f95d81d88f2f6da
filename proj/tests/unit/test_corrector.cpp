#include "homlab/corrector.hpp"
#include "homlab/errors.hpp"
#include "homlab/media.hpp"
#include "support/oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace homlab;
using boost::math::quadrature::gauss_kronrod;

namespace {

double integrate(const std::function<double(double)>& f) {
  return gauss_kronrod<double, 61>::integrate(f, 0.0, 2 * M_PI, 15, 1e-15);
}

Eigen::VectorXd random_field(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> z;
  Eigen::VectorXd v(n);
  for (auto& x : v) x = z(g);
  return v;
}

CorrectorConfig config(std::vector<int> grid) {
  CorrectorConfig c;
  c.grid = std::move(grid);
  return c;
}

}  // namespace

TEST(Corrector, WeakFormIdentity) {
  const auto m = make_periodic_medium(2.0, {USpec::Kind::kBreathing, 0.5});
  const auto disc = CellDiscretization::for_medium(m, {4, 6, 7});
  for (const auto& spec : {OperatorSpec{0.3, 0.1, 1}, OperatorSpec{1e-3, 0.0, 1}, OperatorSpec{0.5, 0.2, 0}}) {
    const DiscreteOperator op(disc, spec);
    const auto phi = random_field(disc.size(), 1), psi = random_field(disc.size(), 2);
    const double lhs = disc.inner(op.apply(phi), psi);
    const double rhs = op.bilinear(phi, psi);
    EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(rhs)));
    EXPECT_NEAR(rhs, psi.dot(op.weak_matrix() * phi), 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

// The stream part never contributes to B(phi, phi).
TEST(Corrector, StreamMatrixDropsOutOfTheQuadraticForm) {
  const auto with = CellDiscretization::for_medium(make_elliptic2d_medium(0.3, 0.8), {1, 9, 11});
  const auto without = CellDiscretization::for_medium(make_elliptic2d_medium(0.3, 0.0), {1, 9, 11});
  const DiscreteOperator a(with, {0.1, 0.0, 1}), b(without, {0.1, 0.0, 1});
  EXPECT_FALSE(a.symmetric());
  EXPECT_TRUE(b.symmetric());
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto phi = random_field(with.size(), s);
    EXPECT_NEAR(a.bilinear(phi, phi), b.bilinear(phi, phi), 1e-10 * b.bilinear(phi, phi));
  }
}

// Centered time differences are antisymmetric: (D_t phi, phi) = 0.
TEST(Corrector, TimeDerivativeIsSkew) {
  const auto m = make_periodic_medium(2.0, {USpec::Kind::kBreathing, 0.5});
  const auto disc = CellDiscretization::for_medium(m, {6, 5, 5});
  const DiscreteOperator with_time(disc, {0.2, 0.0, 1}), without(disc, {0.2, 0.0, 0});
  const auto phi = random_field(disc.size(), 4);
  EXPECT_NEAR(with_time.bilinear(phi, phi), without.bilinear(phi, phi), 1e-10 * without.bilinear(phi, phi));
}

TEST(Corrector, ConstantMediumGivesSigmaSigmaTranspose) {
  Mat sigma(2, 2);
  sigma << 1.0, 0.5, 0.0, 2.0;
  const auto study = run_corrector(make_constant_medium(sigma), config({1, 6, 6}));
  EXPECT_LT((study.A.A - sigma * sigma.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Corrector, OneDimensionalHarmonicMean) {
  const double a0 = 1.0, a1 = 0.5;
  // Harmonic mean, computed directly rather than through the general formula.
  const double oracle = 2 * M_PI / integrate([&](double x) { return 1.0 / (a0 + a1 * std::sin(x)); });
  const auto study = run_corrector(make_periodic1d_medium(a0, a1, 0.0), config({1, 256}));
  EXPECT_NEAR(study.A.A(0, 0), oracle, 1e-4 * oracle);
  EXPECT_TRUE(study.energy_ok);
  EXPECT_TRUE(study.continuation_ok);
}

TEST(Corrector, OneDimensionalWithPotential) {
  const double v1 = 0.5;
  const double expected = oracle::one_dimensional_diffusivity(1.0, 0.0, v1);
  const auto study = run_corrector(make_periodic1d_medium(1.0, 0.0, v1), config({1, 256}));
  EXPECT_NEAR(study.A.A(0, 0), expected, 1e-4 * expected);
}

TEST(Corrector, OneDimensionalBothCoefficients) {
  const double a0 = 1.5, a1 = 0.7, v1 = 0.3;
  const double expected = oracle::one_dimensional_diffusivity(a0, a1, v1);
  const auto study = run_corrector(make_periodic1d_medium(a0, a1, v1), config({1, 256}));
  EXPECT_NEAR(study.A.A(0, 0), expected, 1e-4 * expected);
}

TEST(Corrector, EnergyInequalityOnEverySolve) {
  const auto m = make_periodic_medium(2.0, {USpec::Kind::kBreathing, 0.5});
  const auto study = run_corrector(m, config({6, 12, 12}));
  EXPECT_TRUE(study.energy_ok);
  for (const auto& c : study.coordinates)
    for (const auto& s : c.solutions) {
      EXPECT_LE(s.energy_lhs, s.energy_rhs * (1 + 1e-8));
      EXPECT_LE(s.residual_norm, 1e-9);
    }
}

TEST(Corrector, DeltaContinuationDifferencesShrink) {
  const auto m = make_periodic_medium(2.0, {USpec::Kind::kBreathing, 0.5});
  const auto study = run_corrector(m, config({6, 12, 12}));
  for (const auto& c : study.coordinates) {
    EXPECT_TRUE(c.continuation_monotone);
    for (const auto& diffs : c.continuation)
      for (std::size_t k = 1; k < diffs.size(); ++k) EXPECT_LT(diffs[k], diffs[k - 1]);
  }
}

TEST(Corrector, ResultsDoNotDependOnWorkers) {
  const auto m = make_elliptic2d_medium(0.3, 0.5);
  const auto one = run_corrector(m, config({1, 12, 12}), 1);
  const auto two = run_corrector(m, config({1, 12, 12}), 2);
  EXPECT_EQ(one.A.A, two.A.A);
  EXPECT_EQ(one.A.ci, two.A.ci);
}

// With a~ = 1 the control operator is 1/2 d^2/dx^2, so w = 2 sin x and |sin|_{-1}^2 = 1.
TEST(Norms, SineHasUnitNegativeNorm) {
  const auto disc = CellDiscretization::for_medium(make_periodic1d_medium(1.0, 0.0, 0.0), {1, 256});
  Eigen::VectorXd h(disc.size());
  for (std::size_t k = 0; k < disc.size(); ++k) h(k) = std::sin(2 * M_PI * k / 256.0);
  EXPECT_NEAR(h_minus_one_norm(disc, h), 1.0, 1e-4);
  EXPECT_THROW(h_minus_one_norm(disc, h.array() + 0.1), NumericalError);
  EXPECT_EQ(h_minus_one_norm(disc, 1e-15 * h), 0.0);
}

TEST(Norms, DiscreteNormsOfSimpleFields) {
  const auto disc = CellDiscretization::for_medium(make_periodic1d_medium(1.0, 0.0, 0.0), {1, 256});
  const auto constant = discrete_norms(disc, Eigen::VectorXd::Constant(disc.size(), 3.0));
  EXPECT_NEAR(constant.l2, 3.0, 1e-12);
  EXPECT_NEAR(constant.h1_tilde, 0.0, 1e-12);
  Eigen::VectorXd s(disc.size());
  for (std::size_t k = 0; k < disc.size(); ++k) s(k) = std::sin(2 * M_PI * k / 256.0);
  const auto n = discrete_norms(disc, s);
  EXPECT_NEAR(n.l2, std::sqrt(0.5), 1e-12);
  // sqrt(1/2 * pi(cos^2)) = 1/2
  EXPECT_NEAR(n.h1_tilde, 0.5, 1e-4);
  EXPECT_NEAR(disc.mean(s), 0.0, 1e-14);
}

TEST(Corrector, DriftHasZeroMean) {
  const auto disc = CellDiscretization::for_medium(make_periodic1d_medium(1.0, 0.4, 0.6), {1, 64});
  const auto b = drift_grid(disc, 0);
  EXPECT_NEAR(disc.mean(b.values), 0.0, 1e-13);
  const auto m2 = CellDiscretization::for_medium(make_periodic_medium(1.0, {USpec::Kind::kRotation, 0.4}), {4, 10, 10});
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(m2.mean(drift_grid(m2, i).values), 0.0, 1e-12);
}

TEST(Corrector, ConfigurationErrors) {
  const auto m = make_elliptic2d_medium(0.3, 0.5);
  EXPECT_THROW(run_corrector(m, config({1, 12})), ConfigError);
  EXPECT_THROW(run_corrector(m, config({1, 2, 12})), ConfigError);
  auto bad = config({1, 12, 12});
  bad.lambdas = {1e-2};
  EXPECT_THROW(run_corrector(m, bad), ConfigError);
  bad.lambdas = {1e-2, 1e-3, 2e-5};
  EXPECT_THROW(run_corrector(m, bad), ConfigError);
  const auto open = make_chessboard_medium(0.5, {}, 1, {16, 16, 16}, false);
  EXPECT_THROW(run_corrector(open, config({4, 8, 8})), ConfigError);
}

TEST(Corrector, PeriodizedChessboardSolves) {
  const auto m = make_chessboard_medium(0.5, {0.25, "bump"}, 4, {2, 2, 2}, true);
  const auto study = run_corrector(m, config({8, 16, 16}));
  study.A.check();
  EXPECT_TRUE(study.energy_ok);
  EXPECT_GT(study.A.A(0, 0), 0.0);
}
