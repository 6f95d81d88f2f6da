#pragma once

#include <string>
#include <vector>

namespace homlab {

/// Description of the one-dimensional smoothing kernel used by the
/// chessboard medium.
struct MollifierSpec {
  double support_radius = 0.2;
  std::string profile = "bump";
};

/// Unit-mass bump c * exp(-1 / (1 - (z/r)^2)) on |z| < r, with its
/// antiderivative tabulated once by Gauss-Legendre quadrature.
class Mollifier {
 public:
  explicit Mollifier(const MollifierSpec& spec);

  double radius() const noexcept { return radius_; }
  const MollifierSpec& spec() const noexcept { return spec_; }

  /// Kernel value; exactly zero for |z| >= r.
  double density(double z) const noexcept;

  /// Derivative of the kernel.
  double density_derivative(double z) const noexcept;

  /// Integral of the kernel over (-inf, z]; exactly 0 below -r and 1 above r.
  double cumulative(double z) const noexcept;

  /// Normalization constant c.
  double normalization() const noexcept { return norm_; }

 private:
  MollifierSpec spec_;
  double radius_;
  double norm_;
  double step_;
  std::vector<double> table_;  // cumulative at nodes -r + k*step_
};

}  // namespace homlab
