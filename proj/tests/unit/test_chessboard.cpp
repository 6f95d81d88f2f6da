#include "homlab/errors.hpp"
#include "homlab/json_io.hpp"
#include "homlab/media.hpp"
#include "homlab/mollifier.hpp"
#include "support/oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace homlab;
using boost::math::quadrature::gauss_kronrod;

namespace {

double colour_mean(const StripeRandomness& s) {
  return std::accumulate(s.colors.begin(), s.colors.end(), 0.0) / static_cast<double>(s.colors.size());
}

}  // namespace

TEST(Mollifier, UnitMassAndCumulative) {
  for (double r : {0.1, 0.2, 0.25}) {
    Mollifier m(MollifierSpec{r, "bump"});
    const auto f = [&](double z) { return m.density(z); };
    EXPECT_NEAR((gauss_kronrod<double, 61>::integrate(f, -r, r, 15, 1e-14)), 1.0, 1e-12);
    EXPECT_EQ(m.cumulative(-r), 0.0);
    EXPECT_EQ(m.cumulative(r * 1.01), 1.0);
    EXPECT_EQ(m.density(r), 0.0);
    for (double z : {-0.7 * r, -0.1 * r, 0.0, 0.33 * r, 0.9 * r})
      EXPECT_NEAR(m.cumulative(z), (gauss_kronrod<double, 61>::integrate(f, -r, z, 15, 1e-14)), 1e-10) << z;
  }
}

TEST(Mollifier, DerivativeMatchesFiniteDifference) {
  Mollifier m(MollifierSpec{0.2, "bump"});
  for (double z : {-0.15, -0.05, 0.02, 0.12}) {
    const double h = 1e-6;
    EXPECT_NEAR(m.density_derivative(z), (m.density(z + h) - m.density(z - h)) / (2 * h), 1e-5);
  }
}

TEST(Mollifier, RejectsBadSpecs) {
  EXPECT_THROW(Mollifier(MollifierSpec{0.0, "bump"}), ConfigError);
  EXPECT_THROW(Mollifier(MollifierSpec{0.6, "bump"}), ConfigError);
  EXPECT_THROW(Mollifier(MollifierSpec{0.2, "gauss"}), ConfigError);
}

TEST(Chessboard, DegenerateProbabilities) {
  const auto ones = sample_chessboard(1.0, {}, 11, {64, 64, 64}, false);
  const auto zeros = sample_chessboard(0.0, {}, 11, {64, 64, 64}, false);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(colour_mean(ones.stripes[k]), 1.0);
    EXPECT_EQ(colour_mean(zeros.stripes[k]), 0.0);
  }
}

TEST(Chessboard, ColourMeanWithinBinomialInterval) {
  const auto r = sample_chessboard(0.5, {}, 2024, {10000, 10000, 10000}, false);
  for (int k = 0; k < 3; ++k) {
    ASSERT_EQ(r.stripes[k].colors.size(), 10000u);
    EXPECT_GE(colour_mean(r.stripes[k]), 0.485);
    EXPECT_LE(colour_mean(r.stripes[k]), 0.515);
    EXPECT_GE(r.stripes[k].shift, 0.0);
    EXPECT_LT(r.stripes[k].shift, 1.0);
    EXPECT_EQ(r.stripes[k].first_cell, -5000);
  }
}

TEST(Chessboard, SamplingIsSeedDeterministic) {
  const auto a = sample_chessboard(0.3, {}, 5, {128, 128, 128}, false);
  const auto b = sample_chessboard(0.3, {}, 5, {128, 128, 128}, false);
  const auto c = sample_chessboard(0.3, {}, 6, {128, 128, 128}, false);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(a.stripes[k].colors, b.stripes[k].colors);
    EXPECT_EQ(a.stripes[k].shift, b.stripes[k].shift);
  }
  EXPECT_NE(a.stripes[1].colors, c.stripes[1].colors);
}

TEST(Chessboard, EtaMatchesDirectQuadrature) {
  const MollifierSpec spec{0.2, "bump"};
  const auto r = sample_chessboard(0.5, spec, 77, {400, 400, 400}, false);
  Mollifier m(spec);
  StripeProcess eta(r.stripes[1], m, false);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> where(-150.0, 150.0);
  for (int k = 0; k < 100; ++k) {
    const double x = where(gen);
    EXPECT_NEAR(eta.value(x), oracle::mollified_stripe(m, r.stripes[1], x), 1e-8) << x;
  }
}

TEST(Chessboard, EtaDerivativeAndRange) {
  const auto r = sample_chessboard(0.5, {}, 8, {64, 64, 64}, false);
  Mollifier m(r.mollifier);
  StripeProcess eta(r.stripes[0], m, false);
  for (double x = -20.0; x < 20.0; x += 0.0371) {
    double v = 0, dv = 0;
    eta.evaluate(x, v, dv);
    ASSERT_GE(v, 0.0);
    ASSERT_LE(v, 1.0 + 1e-14);
    const double h = 1e-6;
    EXPECT_NEAR(dv, (eta.value(x + h) - eta.value(x - h)) / (2 * h), 1e-4 * std::max(1.0, std::abs(dv)));
  }
}

TEST(Chessboard, OutsideTheSampledBoxIsAnError) {
  const auto r = sample_chessboard(0.5, {}, 8, {16, 16, 16}, false);
  Mollifier m(r.mollifier);
  StripeProcess eta(r.stripes[2], m, false);
  EXPECT_NO_THROW(eta.value(0.0));
  EXPECT_THROW(eta.value(40.0), ExtentError);
  EXPECT_THROW(eta.value(-40.0), ExtentError);

  const auto rp = sample_chessboard(0.5, {}, 8, {16, 16, 16}, true);
  StripeProcess wrap(rp.stripes[2], m, true);
  EXPECT_NEAR(wrap.value(0.3), wrap.value(0.3 + 16.0), 1e-12);
  EXPECT_NEAR(wrap.value(0.3), wrap.value(0.3 - 160.0), 1e-12);
}

// Spatial averages of eta over one realization approach p.
TEST(Chessboard, StationaryMeanOverOneRealization) {
  const auto r = sample_chessboard(0.5, {}, 31, {20000, 20000, 20000}, false);
  Mollifier m(r.mollifier);
  StripeProcess eta(r.stripes[1], m, false);
  double sum = 0.0;
  int n = 0;
  for (double x = -9000.0; x < 9000.0; x += 0.25, ++n) sum += eta.value(x);
  // 18000 cells, colour standard deviation 0.5: five standard errors.
  EXPECT_NEAR(sum / n, 0.5, 5.0 * 0.5 / std::sqrt(18000.0));
}

TEST(Chessboard, RandomnessRoundTripsThroughJson) {
  const auto r = sample_chessboard(0.4, {0.15, "bump"}, 123, {32, 48, 64}, true);
  const auto back = chessboard_from_json(Json::parse(dump_json(to_json(r))));
  EXPECT_EQ(back.p, r.p);
  EXPECT_EQ(back.seed, r.seed);
  EXPECT_EQ(back.periodic, r.periodic);
  EXPECT_EQ(back.mollifier.support_radius, r.mollifier.support_radius);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(back.stripes[k].colors, r.stripes[k].colors);
    EXPECT_EQ(back.stripes[k].shift, r.stripes[k].shift);
    EXPECT_EQ(back.stripes[k].first_cell, r.stripes[k].first_cell);
  }
  EXPECT_EQ(back.extent(), (std::array<std::int64_t, 3>{32, 48, 64}));

  auto bad = to_json(r);
  bad["stripes"][0]["colors"][0] = 2;
  EXPECT_THROW(chessboard_from_json(bad), ConfigError);
}
