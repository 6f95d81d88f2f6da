#include "homlab/errors.hpp"
#include "homlab/media.hpp"
#include "homlab/sde.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace homlab;

namespace {

SdeConfig config(double dt, double horizon, std::uint64_t seed = 1, std::uint64_t path = 0) {
  SdeConfig c;
  c.dt = dt;
  c.horizon = horizon;
  c.seed = seed;
  c.path_index = path;
  return c;
}

}  // namespace

TEST(Sde, BrownianVarianceForConstantSigma) {
  Mat sigma(2, 2);
  sigma << 1.0, 0.0, 0.5, 1.5;
  const auto m = make_constant_medium(sigma);
  const Mat a = sigma * sigma.transpose();
  const int n = 4000;
  const double T = 2.0;
  Mat cov = Mat::Zero(2, 2);
  for (int p = 0; p < n; ++p) {
    const auto traj = simulate(m, config(0.05, T, 9, p), Vec::Zero(2));
    const Vec x = traj.states.back();
    cov += x * x.transpose();
  }
  cov /= n * T;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double se = std::sqrt((a(i, i) * a(j, j) + a(i, j) * a(i, j)) / n);
      EXPECT_NEAR(cov(i, j), a(i, j), 5 * se) << i << j;
    }
}

TEST(Sde, ConstantDriftBiasIsIntegratedExactly) {
  Vec b(2);
  b << 0.3, -0.2;
  const auto m = make_constant_medium(Mat::Zero(2, 2), Mat::Zero(2, 2), b);
  const auto traj = simulate(m, config(0.1, 5.0), Vec::Zero(2));
  EXPECT_LT((traj.states.back() - 5.0 * b).norm(), 1e-12);
}

TEST(Sde, PathsAreReproducible) {
  const auto m = make_periodic_medium(1.0, {USpec::Kind::kRotation, 0.3});
  const Vec start = (Vec(2) << 1.0, 2.0).finished();
  const auto a = simulate(m, config(0.01, 5.0, 4, 11), start);
  const auto b = simulate(m, config(0.01, 5.0, 4, 11), start);
  const auto c = simulate(m, config(0.01, 5.0, 4, 12), start);
  ASSERT_EQ(a.states.size(), 501u);
  EXPECT_EQ(a.states, b.states);
  EXPECT_NE(a.states.back(), c.states.back());
}

TEST(Sde, RecordingDoesNotChangeThePath) {
  const auto m = make_elliptic2d_medium(0.3, 0.5);
  auto cfg = config(0.01, 2.0, 3, 5);
  const auto full = simulate(m, cfg, Vec::Zero(2));
  cfg.record_every = 10;
  const auto thin = simulate(m, cfg, Vec::Zero(2));
  ASSERT_EQ(thin.states.size(), 21u);
  for (std::size_t k = 0; k < thin.states.size(); ++k) EXPECT_EQ(thin.states[k], full.states[10 * k]);
  EXPECT_DOUBLE_EQ(thin.times.back(), 2.0);
}

TEST(Sde, ZeroTimeNoiseReproducesTheSpatialPath) {
  const auto m = make_periodic_medium(2.0, {USpec::Kind::kBreathing, 0.5});
  const Vec start = (Vec(2) << 1.0, 2.0).finished();
  const auto cfg = config(0.01, 3.0, 8, 2);
  const auto plain = simulate(m, cfg, start);
  const auto lifted = simulate_delta(m, cfg, 0.0, start);
  ASSERT_EQ(lifted.states.size(), plain.states.size());
  for (std::size_t k = 0; k < plain.states.size(); ++k) {
    EXPECT_NEAR(lifted.states[k](0), plain.times[k], 1e-12);
    EXPECT_EQ(lifted.states[k].tail(2), plain.states[k]);
  }
  const auto noisy = simulate_delta(m, cfg, 0.5, start);
  EXPECT_GT(std::abs(noisy.states.back()(0) - 3.0), 0.0);
}

TEST(Sde, ControlDynamicsMatchFullDynamicsForConstantMedia) {
  Mat sigma(2, 2);
  sigma << 1.0, 0.2, 0.0, 0.7;
  const auto m = make_constant_medium(sigma);
  const auto cfg = config(0.02, 1.0, 6, 1);
  EXPECT_EQ(simulate(m, cfg, Vec::Zero(2)).states, simulate_control(m, cfg, Vec::Zero(2)).states);
}

TEST(Sde, DegenerateMediumKeepsThePathInItsCell) {
  const auto m = make_periodic_medium(1.0, {});
  const Vec start = (Vec(2) << 2.0, 4.0).finished();
  const auto traj = simulate(m, config(0.001, 20.0, 5, 0), start);
  for (const auto& x : traj.states) {
    ASSERT_GT(x(0), 0.0);
    ASSERT_LT(x(0), 2 * M_PI);
    ASSERT_GT(x(1), 0.0);
    ASSERT_LT(x(1), 2 * M_PI);
  }
}

TEST(Sde, ConfigValidation) {
  const auto m = make_constant_medium(Mat::Identity(2, 2));
  EXPECT_THROW(simulate(m, config(0.03, 1.0), Vec::Zero(2)), ConfigError);
  EXPECT_THROW(simulate(m, config(-0.1, 1.0), Vec::Zero(2)), ConfigError);
  EXPECT_THROW(simulate(m, config(0.1, 1.0), Vec::Zero(3)), ConfigError);
  auto bad = config(0.1, 1.0);
  bad.scheme = "milstein";
  EXPECT_THROW(simulate(m, bad, Vec::Zero(2)), ConfigError);
  EXPECT_EQ(config(0.1, 1.0).steps(), 10u);
}

TEST(Sde, RescaleNeedsEnoughHorizon) {
  const auto m = make_constant_medium(Mat::Identity(1, 1));
  const auto traj = simulate(m, config(0.01, 100.0), Vec::Zero(1));
  const auto z = rescale(traj, 0.1, 1.0);
  EXPECT_DOUBLE_EQ(z.times.back(), 1.0);
  EXPECT_DOUBLE_EQ(z.states.back()(0), 0.1 * traj.states.back()(0));
  EXPECT_THROW(rescale(traj, 0.05, 1.0), ExtentError);
}

TEST(Sde, StabilityWarning) {
  EXPECT_DOUBLE_EQ(default_dt(0.5), 1e-3);
  EXPECT_DOUBLE_EQ(default_dt(10.0), 1e-5);
  EXPECT_FALSE(stability_warning(config(1e-3, 1.0), 4.0).has_value());
  EXPECT_TRUE(stability_warning(config(1e-2, 1.0), 4.0).has_value());
}

TEST(Sde, ChessboardPathsLeavingTheBoxFail) {
  const auto m = make_chessboard_medium(0.5, {}, 1, {4, 4, 4}, false);
  EXPECT_THROW(simulate(m, config(0.01, 10.0), Vec::Zero(2)), ExtentError);
}

TEST(Sde, PiDistributedShiftIsDeterministicAndInsideTheCell) {
  const auto m = make_periodic_medium(1.0, {});
  for (std::uint64_t p = 0; p < 50; ++p) {
    const auto a = pi_distributed_shift(m, 3, p);
    const auto b = pi_distributed_shift(m, 3, p);
    EXPECT_EQ(a.origin_space(), b.origin_space());
    EXPECT_EQ(a.origin_time(), b.origin_time());
    for (int i = 0; i < 2; ++i) {
      EXPECT_GE(a.origin_space()(i), 0.0);
      EXPECT_LT(a.origin_space()(i), 2 * M_PI);
    }
  }
}

// exp(-2V) with V = v cos x puts more mass near x = pi.
TEST(Sde, PiDistributedShiftFollowsThePotential) {
  const double v = 0.8;
  const auto m = make_periodic1d_medium(1.0, 0.0, v);
  const int n = 4000;
  double mean_cos = 0.0;
  for (int p = 0; p < n; ++p) mean_cos += std::cos(pi_distributed_shift(m, 12, p).origin_space()(0));
  mean_cos /= n;
  // E cos X = -I1(2v) / I0(2v) under exp(-2v cos x).
  const double expected = -std::cyl_bessel_i(1.0, 2 * v) / std::cyl_bessel_i(0.0, 2 * v);
  EXPECT_NEAR(mean_cos, expected, 5 * std::sqrt(0.5 / n));
}
