#include "homlab/mollifier.hpp"

#include "homlab/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>

namespace homlab {
namespace {

constexpr int kTableIntervals = 4096;

// Unnormalized bump on the unit ball.
double unit_bump(double u) noexcept {
  const double q = 1.0 - u * u;
  return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

}  // namespace

Mollifier::Mollifier(const MollifierSpec& spec) : spec_(spec), radius_(spec.support_radius) {
  if (spec.profile != "bump") throw ConfigError("unknown mollifier profile '" + spec.profile + "'");
  if (!(radius_ > 0.0) || radius_ > 0.25)
    throw ConfigError("mollifier support radius must lie in (0, 1/4]");

  using Quad = boost::math::quadrature::gauss<double, 20>;
  step_ = 2.0 * radius_ / kTableIntervals;
  table_.resize(kTableIntervals + 1);
  table_[0] = 0.0;
  const auto f = [this](double z) { return unit_bump(z / radius_); };
  for (int k = 0; k < kTableIntervals; ++k) {
    const double lo = -radius_ + k * step_;
    table_[k + 1] = table_[k] + Quad::integrate(f, lo, lo + step_);
  }
  norm_ = 1.0 / table_.back();
  for (auto& v : table_) v *= norm_;
  table_.back() = 1.0;
}

double Mollifier::density(double z) const noexcept { return norm_ * unit_bump(z / radius_); }

double Mollifier::density_derivative(double z) const noexcept {
  const double u = z / radius_;
  const double q = 1.0 - u * u;
  if (q <= 0.0) return 0.0;
  return norm_ * std::exp(-1.0 / q) * (-2.0 * u / (q * q)) / radius_;
}

double Mollifier::cumulative(double z) const noexcept {
  if (z <= -radius_) return 0.0;
  if (z >= radius_) return 1.0;
  const double s = (z + radius_) / step_;
  int k = static_cast<int>(s);
  if (k >= kTableIntervals) k = kTableIntervals - 1;
  const double x = s - k;
  const double z0 = -radius_ + k * step_;
  // Cubic Hermite with exact endpoint derivatives (the kernel itself).
  const double p0 = table_[k], p1 = table_[k + 1];
  const double m0 = density(z0) * step_, m1 = density(z0 + step_) * step_;
  const double x2 = x * x, x3 = x2 * x;
  const double v = (2 * x3 - 3 * x2 + 1) * p0 + (x3 - 2 * x2 + x) * m0 + (-2 * x3 + 3 * x2) * p1 + (x3 - x2) * m1;
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace homlab
