#pragma once

// Independent reference values computed by adaptive Gauss-Kronrod quadrature.

#include "homlab/media.hpp"
#include "homlab/mollifier.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace homlab::oracle {

inline double integrate(const std::function<double(double)>& f, double lo, double hi) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-15);
}

inline double integrate_period(const std::function<double(double)>& f) { return integrate(f, 0.0, 2 * M_PI); }

/// A for a = a0 + a1 sin x, V = v1 cos x on the circle:
/// (2 pi)^2 / (int exp(2V) / a * int exp(-2V)).
inline double one_dimensional_diffusivity(double a0, double a1, double v1) {
  const double num = integrate_period([&](double x) { return std::exp(2 * v1 * std::cos(x)) / (a0 + a1 * std::sin(x)); });
  const double den = integrate_period([&](double x) { return std::exp(-2 * v1 * std::cos(x)); });
  return 4 * M_PI * M_PI / (num * den);
}

/// int phi(z) color(floor(x + shift - z)) dz, split at the cell boundaries.
inline double mollified_stripe(const Mollifier& m, const StripeRandomness& s, double x) {
  const double y = x + s.shift;
  const double r = m.radius();
  std::vector<double> cuts{-r, r};
  for (double k = std::ceil(y - r); k < y + r; k += 1.0)
    if (y - k > -r && y - k < r) cuts.push_back(y - k);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    const auto cell = static_cast<std::int64_t>(std::floor(y - mid));
    if (s.colors.at(static_cast<std::size_t>(cell - s.first_cell)) == 0) continue;
    total += integrate([&](double z) { return m.density(z); }, cuts[i], cuts[i + 1]);
  }
  return total;
}

}  // namespace homlab::oracle
