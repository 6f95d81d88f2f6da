#pragma once

#include "homlab/coefficient_field.hpp"
#include "homlab/mollifier.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace homlab {

// ---------------------------------------------------------------------------
// Degenerate periodic medium on the torus [0, 2pi)^3 (time, x, y):
//   sigma~ = (1 - cos x)(1 - cos y) Id,  sigma = sigma~ U,  V = H = 0.

/// Smooth 2pi-periodic matrix field U(t, x, y).
struct USpec {
  enum class Kind { kIdentity, kRotation, kBreathing };
  Kind kind = Kind::kIdentity;
  /// Rotation: angle = amplitude * (sin t + sin x cos y).
  /// Breathing: U = sqrt(1 + amplitude * sin(t + x)) Id, amplitude in [0, 1).
  double amplitude = 0.0;

  static Kind parse_kind(const std::string& name);
  static std::string kind_name(Kind kind);
};

class PeriodicField final : public CoefficientField {
 public:
  PeriodicField(double alpha, USpec u);

  int dim() const noexcept override { return 2; }
  std::string kind() const override { return "periodic"; }
  void evaluate(double t, const Vec& x, PointEval& out) const override;
  void evaluate_control(const Vec& x, ControlEval& out) const override;
  double potential(const Vec&) const override { return 0.0; }
  CellGeometry geometry() const override;
  bool time_dependent() const noexcept override;
  double bound() const override { return bound_; }
  ControlConstants control_constants() const override;

  double alpha() const noexcept { return alpha_; }
  const USpec& u_spec() const noexcept { return u_; }

  /// U and the partials of U U^T at a point.
  void u_field(double t, double x, double y, Mat& U, Mat& gram, Mat& gram_t, Mat& gram_x, Mat& gram_y) const;

 private:
  double alpha_;
  USpec u_;
  double bound_ = 0.0;
};

/// Rejects U fields violating alpha^-1 Id <= U U^T <= alpha Id on a
/// validation grid.
MediumInstance make_periodic_medium(double alpha, const USpec& u);

// ---------------------------------------------------------------------------
// Random chessboard medium: three independent mollified, randomly shifted
// Bernoulli stripe processes beta_t, alpha1_{x1}, alpha2_{x2};
//   sigma = sigma~ = diag(1, alpha1), V = 0,
//   H = [[0, alpha1^2 beta], [-alpha1^2 beta, 0]].

/// Sampled randomness for one stripe process on the cells
/// [first_cell, first_cell + colors.size()).
struct StripeRandomness {
  std::vector<int> colors;
  double shift = 0.0;  // uniform on [0, 1)
  std::int64_t first_cell = 0;
};

struct ChessboardRandomness {
  double p = 0.5;
  std::uint64_t seed = 0;
  bool periodic = false;
  MollifierSpec mollifier;
  std::array<StripeRandomness, 3> stripes;  // beta (time), alpha1 (x1), alpha2 (x2)

  /// Extent in cells per axis, time first.
  std::array<std::int64_t, 3> extent() const;
};

/// Samples colors and shifts; the box covers cells [-E/2, E - E/2) per axis.
ChessboardRandomness sample_chessboard(double p, const MollifierSpec& mollifier, std::uint64_t seed,
                                       const std::array<std::int64_t, 3>& extent, bool periodic);

/// A mollified stripe process eta(x) = sum_k eps_k [Phi(y - k) - Phi(y - k - 1)], y = x + shift.
class StripeProcess {
 public:
  StripeProcess(const StripeRandomness& randomness, const Mollifier& mollifier, bool periodic);

  /// Value and first derivative. Throws ExtentError outside the sampled box
  /// (non-periodic case).
  void evaluate(double x, double& value, double& derivative) const;
  double value(double x) const;

 private:
  int color(std::int64_t cell) const;

  const StripeRandomness* r_;
  const Mollifier* mollifier_;
  bool periodic_;
};

class ChessboardField final : public CoefficientField {
 public:
  explicit ChessboardField(ChessboardRandomness randomness);

  int dim() const noexcept override { return 2; }
  std::string kind() const override { return "chessboard"; }
  void evaluate(double t, const Vec& x, PointEval& out) const override;
  void evaluate_control(const Vec& x, ControlEval& out) const override;
  double potential(const Vec&) const override { return 0.0; }
  CellGeometry geometry() const override;
  bool time_dependent() const noexcept override { return true; }
  double bound() const override;
  ControlConstants control_constants() const override;

  const ChessboardRandomness& randomness() const noexcept { return r_; }
  const Mollifier& mollifier() const noexcept { return mollifier_; }

  /// The stripe processes: 0 = beta (time), 1 = alpha1, 2 = alpha2.
  const StripeProcess& stripe(int which) const { return stripes_.at(which); }

 private:
  ChessboardRandomness r_;
  Mollifier mollifier_;
  std::vector<StripeProcess> stripes_;
};

MediumInstance make_chessboard_medium(double p, const MollifierSpec& mollifier, std::uint64_t seed,
                                      const std::array<std::int64_t, 3>& extent, bool periodic);
MediumInstance make_chessboard_medium(ChessboardRandomness randomness);

// ---------------------------------------------------------------------------
// Diagnostic media.

/// Constant sigma and H with V = 0; sigma~ = sigma. `drift_bias` adds a
/// constant drift outside the coefficient formula (diagnostics only).
class ConstantField final : public CoefficientField {
 public:
  ConstantField(Mat sigma, Mat H, Vec drift_bias);

  int dim() const noexcept override { return static_cast<int>(sigma_.rows()); }
  std::string kind() const override { return "constant"; }
  void evaluate(double t, const Vec& x, PointEval& out) const override;
  void evaluate_control(const Vec& x, ControlEval& out) const override;
  double potential(const Vec&) const override { return 0.0; }
  CellGeometry geometry() const override;
  bool time_dependent() const noexcept override { return false; }
  double bound() const override;
  ControlConstants control_constants() const override;
  Vec drift_bias() const override { return bias_; }

 private:
  Mat sigma_;
  Mat H_;
  Vec bias_;
};

MediumInstance make_constant_medium(const Mat& sigma, const Mat& H, const Vec& drift_bias);
MediumInstance make_constant_medium(const Mat& sigma);

/// One-dimensional periodic medium on [0, 2pi): a = a0 + a1 sin x,
/// V = v1 cos x, sigma = sqrt(a), a~ = a, H = 0.
class Periodic1DField final : public CoefficientField {
 public:
  Periodic1DField(double a0, double a1, double v1);

  int dim() const noexcept override { return 1; }
  std::string kind() const override { return "periodic1d"; }
  void evaluate(double t, const Vec& x, PointEval& out) const override;
  void evaluate_control(const Vec& x, ControlEval& out) const override;
  double potential(const Vec& x) const override;
  CellGeometry geometry() const override;
  bool time_dependent() const noexcept override { return false; }
  double bound() const override;
  ControlConstants control_constants() const override;

  double a0() const noexcept { return a0_; }
  double a1() const noexcept { return a1_; }
  double v1() const noexcept { return v1_; }

 private:
  double a0_, a1_, v1_;
};

MediumInstance make_periodic1d_medium(double a0, double a1, double v1);

/// Uniformly elliptic smooth 2D medium on [0, 2pi)^2:
/// sigma = (1 + kappa cos x cos y) Id, sigma~ = Id, V = 0,
/// H = eta sin x sin y [[0, 1], [-1, 0]].
class Elliptic2DField final : public CoefficientField {
 public:
  Elliptic2DField(double kappa, double eta);

  int dim() const noexcept override { return 2; }
  std::string kind() const override { return "elliptic2d"; }
  void evaluate(double t, const Vec& x, PointEval& out) const override;
  void evaluate_control(const Vec& x, ControlEval& out) const override;
  double potential(const Vec&) const override { return 0.0; }
  CellGeometry geometry() const override;
  bool time_dependent() const noexcept override { return false; }
  double bound() const override;
  ControlConstants control_constants() const override;

 private:
  double kappa_, eta_;
};

MediumInstance make_elliptic2d_medium(double kappa, double eta);

/// The chessboard field behind an instance, or nullptr.
const ChessboardField* as_chessboard(const MediumInstance& medium) noexcept;

}  // namespace homlab
