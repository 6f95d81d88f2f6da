#pragma once

#include "homlab/linalg.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace homlab {

/// Everything the diffusion and the generator need at one space-time point.
struct PointEval {
  Mat sigma;       // d x d
  Mat a;           // sigma sigma^T
  Mat H;           // antisymmetric stream matrix
  double V = 0.0;  // potential, time independent
  Vec grad_V;
  MatGrad grad_a;  // grad_a[j] = D_j a
  MatGrad grad_H;  // grad_H[j] = D_j H
  Mat dt_a;
  Mat dt_H;

  void resize(int d);
};

/// The time-independent control coefficients sigma~, a~ and D_j a~.
struct ControlEval {
  Mat sigma_tilde;
  Mat a_tilde;
  MatGrad grad_a_tilde;

  void resize(int d);
};

/// Constants m, M, C1^H, C2^H, C2^a bounding a, H, D_t H and D_t a by a~.
struct ControlConstants {
  double m = 1.0;
  double M = 1.0;
  double C1_H = 0.0;
  double C2_H = 0.0;
  double C2_a = 0.0;

  /// Throws ConfigError unless 0 < m <= M and every constant is finite and >= 0.
  void check() const;
};

/// Cell periods (time first) for periodic fields; empty for genuinely
/// stationary-random ones.
struct CellGeometry {
  std::optional<std::vector<double>> periods;

  bool periodic() const noexcept { return periods.has_value(); }
};

/// A realization of the coefficient functions sigma, sigma~, V, H with
/// their first derivatives, in the (t, x) coordinates of the medium.
class CoefficientField {
 public:
  virtual ~CoefficientField() = default;

  virtual int dim() const noexcept = 0;
  virtual std::string kind() const = 0;

  virtual void evaluate(double t, const Vec& x, PointEval& out) const = 0;
  virtual void evaluate_control(const Vec& x, ControlEval& out) const = 0;

  /// V alone; cheaper than a full evaluation.
  virtual double potential(const Vec& x) const;

  virtual CellGeometry geometry() const = 0;
  virtual bool time_dependent() const noexcept = 0;

  /// Uniform bound K on sigma, a, b, sigma~, V, H.
  virtual double bound() const = 0;

  /// Constants this medium is constructed to satisfy.
  virtual ControlConstants control_constants() const = 0;

  /// Extra constant drift for diagnostic media; zero for every medium
  /// built from the coefficient formula.
  virtual Vec drift_bias() const;

  Mat sigma(double t, const Vec& x) const;
  Mat sigma_tilde(const Vec& x) const;
  Mat stream(double t, const Vec& x) const;
};

/// One medium realization together with the shift tau_{t,x}.
///
/// Evaluating at (t, x) reads the underlying field at (t + t0, x + x0).
/// Instances are immutable and cheap to copy; the field is shared.
class MediumInstance {
 public:
  MediumInstance() = default;
  MediumInstance(std::shared_ptr<const CoefficientField> field, std::string id = {});

  const CoefficientField& field() const noexcept { return *field_; }
  std::shared_ptr<const CoefficientField> field_ptr() const noexcept { return field_; }
  int dim() const noexcept { return field_->dim(); }
  const std::string& id() const noexcept { return id_; }

  double origin_time() const noexcept { return t0_; }
  const Vec& origin_space() const noexcept { return x0_; }

  /// The instance tau_{s,y} omega.
  MediumInstance shifted(double s, const Vec& y) const;

  void evaluate(double t, const Vec& x, PointEval& out) const;
  void evaluate_control(const Vec& x, ControlEval& out) const;
  double potential(const Vec& x) const;

 private:
  std::shared_ptr<const CoefficientField> field_;
  std::string id_;
  double t0_ = 0.0;
  Vec x0_;
};

}  // namespace homlab
