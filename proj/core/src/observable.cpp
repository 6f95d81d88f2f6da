#include "homlab/observable.hpp"

#include "homlab/errors.hpp"

#include <cmath>
#include <regex>

namespace homlab {

Observable make_observable(const std::string& name, int d) {
  if (name == "one") return {name, [](const PointEval&, double, const Vec&) { return 1.0; }, true};
  if (name == "V") return {name, [](const PointEval& p, double, const Vec&) { return p.V; }};

  std::smatch m;
  static const std::regex a_re(R"(a_([1-9])([1-9]))");
  static const std::regex sin_re(R"(sin_x([1-9]))");
  if (std::regex_match(name, m, a_re)) {
    const int i = std::stoi(m[1]) - 1, j = std::stoi(m[2]) - 1;
    if (i >= d || j >= d) throw ConfigError("observable '" + name + "' exceeds the dimension");
    return {name, [i, j](const PointEval& p, double, const Vec&) { return p.a(i, j); }};
  }
  if (std::regex_match(name, m, sin_re)) {
    const int k = std::stoi(m[1]) - 1;
    if (k >= d) throw ConfigError("observable '" + name + "' exceeds the dimension");
    return {name, [k](const PointEval&, double, const Vec& x) { return std::sin(x(k)); }};
  }
  throw ConfigError("unknown observable '" + name + "' (expected one, V, a_ij or sin_xk)");
}

double observe(const MediumInstance& medium, const Observable& f, double t, const Vec& x) {
  PointEval p;
  medium.evaluate(t, x, p);
  return f(p, t + medium.origin_time(), x + medium.origin_space());
}

double pi_mean(const MediumInstance& medium, const Observable& f, int resolution) {
  const auto geo = medium.field().geometry();
  if (!geo.periodic()) throw ConfigError("pi_mean by quadrature needs a periodic medium");
  if (resolution < 2) throw ConfigError("quadrature needs at least 2 points per axis");
  const int d = medium.dim();
  const auto& per = *geo.periods;
  const int nt = medium.field().time_dependent() ? resolution : 1;

  PointEval p;
  Vec x(d);
  std::vector<int> idx(d, 0);
  double num = 0.0, den = 0.0;
  for (int it = 0; it < nt; ++it) {
    const double t = per[0] * (it + 0.5) / nt;
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      for (int i = 0; i < d; ++i) x(i) = per[i + 1] * (idx[i] + 0.5) / resolution;
      medium.field().evaluate(t, x, p);
      const double w = std::exp(-2.0 * p.V);
      num += w * f(p, t, x);
      den += w;
      int k = 0;
      while (k < d && ++idx[k] == resolution) idx[k++] = 0;
      if (k == d) break;
    }
  }
  return num / den;
}

}  // namespace homlab
