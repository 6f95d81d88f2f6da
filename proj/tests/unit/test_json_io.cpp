#include "homlab/errors.hpp"
#include "homlab/json_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

using namespace homlab;

TEST(JsonIo, SeventeenDigitsRoundTripEveryDouble) {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-300, 300);
  for (int k = 0; k < 2000; ++k) {
    const double v = std::ldexp(mant(g), expo(g));
    const auto back = Json::parse(dump_json(Json{{"v", v}}));
    ASSERT_EQ(back["v"].get<double>(), v);
  }
}

TEST(JsonIo, NonFiniteNumbersBecomeNull) {
  const auto text = dump_json(Json{{"nan", std::numeric_limits<double>::quiet_NaN()},
                                   {"inf", std::numeric_limits<double>::infinity()},
                                   {"one", 1.0}});
  const auto j = Json::parse(text);
  EXPECT_TRUE(j["nan"].is_null());
  EXPECT_TRUE(j["inf"].is_null());
  EXPECT_EQ(j["one"].get<double>(), 1.0);
  EXPECT_NE(dump_json(Json{{"x", 0.1}}).find("0.10000000000000001"), std::string::npos);
}

TEST(JsonIo, EffectiveDiffusivityLayouts) {
  EffectiveDiffusivity a;
  a.A = (Mat(2, 2) << 1.0, 0.25, 0.25, 2.0).finished();
  a.ci = Mat::Constant(2, 2, 0.01);
  a.method = "corrector";
  const auto nested = Json{{"schema_version", 1}, {"effective_diffusivity", to_json(a)}};
  EXPECT_EQ(effective_from_json(nested).A, a.A);
  const auto flat = to_json(a);
  EXPECT_EQ(effective_from_json(flat).A, a.A);
  EXPECT_EQ(effective_from_json(flat).method, "corrector");
  EXPECT_THROW(effective_from_json(Json{{"B", 1}}), ConfigError);
  EXPECT_THROW(matrix_from_json(Json::parse("[[1, 2], [3]]")), ConfigError);
}

TEST(JsonIo, CsvHeaders) {
  MonteCarloEstimate e;
  e.per_time.push_back({0.5, Mat::Identity(1, 1), Mat::Zero(1, 1)});
  std::ostringstream moments;
  write_moments_csv(moments, e);
  EXPECT_EQ(moments.str().substr(0, moments.str().find('\n')), "t,i,j,estimate,ci_half_width");

  ErgodicCurve c;
  c.t = {1.0};
  c.error = {0.5};
  c.ci = {0.1};
  std::ostringstream ergodic;
  write_ergodic_csv(ergodic, c);
  EXPECT_EQ(ergodic.str(), "t,error,ci_half_width\n1,0.5,0.10000000000000001\n");

  Trajectory t;
  t.times = {0.0, 0.1};
  t.states = {Vec::Zero(2), Vec::Ones(2)};
  std::ostringstream trajs;
  write_trajectories_csv(trajs, {t});
  EXPECT_EQ(trajs.str().substr(0, trajs.str().find('\n')), "path,step,t,x1,x2");

  GridShape s{{2, 3}, {1.0, 1.0}};
  GridFunction f(s);
  std::ostringstream grid;
  write_grid_csv(grid, f);
  EXPECT_EQ(grid.str().substr(0, grid.str().find('\n')), "it,i1,t,x1,value");
}
