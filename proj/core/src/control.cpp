#include "homlab/control.hpp"

#include "homlab/errors.hpp"
#include "homlab/media.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace homlab {

namespace {

constexpr double kPass = -1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Ratio bookkeeping for one inequality q(v) <= C qt(v) (or >= for the lower bound).
struct Ratio {
  double lo = kInf;
  double hi = 0.0;

  void add(double q, double qt) {
    constexpr double tiny = 1e-13;
    if (qt > tiny) {
      lo = std::min(lo, q / qt);
      hi = std::max(hi, q / qt);
    } else if (q > tiny) {
      hi = kInf;
    }
  }
};

}  // namespace

SampleGrid SampleGrid::for_medium(const MediumInstance& medium, int resolution) {
  if (resolution < 2) throw ConfigError("sample grid needs at least 2 points per axis");
  const int d = medium.dim();
  SampleGrid g;
  g.resolution = resolution;
  g.lo.assign(d + 1, 0.0);
  if (const auto geo = medium.field().geometry(); geo.periodic()) {
    g.hi = *geo.periods;
  } else if (const auto* cb = as_chessboard(medium)) {
    const auto e = cb->randomness().extent();
    g.hi.resize(d + 1);
    for (int k = 0; k <= d; ++k) {
      const double half = 0.25 * static_cast<double>(e[k]);
      g.lo[k] = -half - (k == 0 ? medium.origin_time() : medium.origin_space()(k - 1));
      g.hi[k] = g.lo[k] + 2.0 * half;
    }
  } else {
    g.hi.assign(d + 1, 2.0 * std::numbers::pi);
  }
  return g;
}

std::vector<Vec> direction_set(int d) {
  std::vector<Vec> dirs;
  if (d == 1) {
    dirs.push_back(Vec::Ones(1));
  } else if (d == 2) {
    for (int k = 0; k < 64; ++k) {
      const double th = std::numbers::pi * k / 64.0;
      Vec v(2);
      v << std::cos(th), std::sin(th);
      dirs.push_back(v);
    }
  } else {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < 128; ++k) {
      const double z = 1.0 - (k + 0.5) / 128.0;
      const double r = std::sqrt(1.0 - z * z);
      Vec v(3);
      v << r * std::cos(golden * k), r * std::sin(golden * k), z;
      dirs.push_back(v);
    }
  }
  return dirs;
}

ControlReport validate_control(const MediumInstance& medium, const ControlConstants& constants,
                               const SampleGrid& grid) {
  if (grid.resolution < 2) throw ConfigError("sample grid needs at least 2 points per axis");
  const int d = medium.dim();
  if (static_cast<int>(grid.lo.size()) != d + 1 || static_cast<int>(grid.hi.size()) != d + 1)
    throw ConfigError("sample grid box must have d + 1 axes");

  const auto dirs = direction_set(d);
  const char* names[] = {"a - m a~", "M a~ - a", "C1_H a~ - |H|", "C2_H a~ - |D_t H|", "C2_a a~ - |D_t a|"};
  ControlReport rep;
  for (const char* n : names) rep.margins.push_back({n, kInf, true});
  Ratio r_a, r_h, r_dth, r_dta;
  rep.min_eigenvalue_a = kInf;
  rep.min_eigenvalue_a_tilde = kInf;

  PointEval p;
  ControlEval c;
  Vec x(d);
  std::vector<int> idx(d + 1, 0);
  const int n = grid.resolution;
  while (true) {
    const double t = grid.lo[0] + (grid.hi[0] - grid.lo[0]) * idx[0] / n;
    for (int i = 0; i < d; ++i) x(i) = grid.lo[i + 1] + (grid.hi[i + 1] - grid.lo[i + 1]) * idx[i + 1] / n;
    medium.evaluate(t, x, p);
    medium.evaluate_control(x, c);
    ++rep.points;

    rep.max_antisymmetry_defect = std::max(rep.max_antisymmetry_defect, antisymmetry_defect(p.H));
    rep.min_eigenvalue_a = std::min(rep.min_eigenvalue_a, min_symmetric_eigenvalue(p.a));
    rep.min_eigenvalue_a_tilde = std::min(rep.min_eigenvalue_a_tilde, min_symmetric_eigenvalue(c.a_tilde));

    const Mat absH = matrix_abs(p.H);
    const Mat absDtH = matrix_abs(p.dt_H);
    const Mat absDta = matrix_abs(p.dt_a);
    for (const Vec& v : dirs) {
      const double qt = v.dot(c.a_tilde * v);
      const double qa = v.dot(p.a * v);
      const double qh = v.dot(absH * v);
      const double qdth = v.dot(absDtH * v);
      const double qdta = v.dot(absDta * v);
      auto& m = rep.margins;
      m[0].margin = std::min(m[0].margin, qa - constants.m * qt);
      m[1].margin = std::min(m[1].margin, constants.M * qt - qa);
      m[2].margin = std::min(m[2].margin, constants.C1_H * qt - qh);
      m[3].margin = std::min(m[3].margin, constants.C2_H * qt - qdth);
      m[4].margin = std::min(m[4].margin, constants.C2_a * qt - qdta);
      r_a.add(qa, qt);
      r_h.add(qh, qt);
      r_dth.add(qdth, qt);
      r_dta.add(qdta, qt);
    }

    int k = 0;
    while (k <= d && ++idx[k] == n) idx[k++] = 0;
    if (k > d) break;
  }

  for (auto& m : rep.margins) {
    m.passed = m.margin >= kPass;
    rep.passed = rep.passed && m.passed;
  }
  rep.estimated.m = r_a.lo == kInf ? 0.0 : r_a.lo;
  rep.estimated.M = r_a.hi;
  rep.estimated.C1_H = r_h.hi;
  rep.estimated.C2_H = r_dth.hi;
  rep.estimated.C2_a = r_dta.hi;
  return rep;
}

}  // namespace homlab
