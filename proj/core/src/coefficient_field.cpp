#include "homlab/coefficient_field.hpp"

#include "homlab/errors.hpp"

#include <cmath>

namespace homlab {

void PointEval::resize(int d) {
  sigma = Mat::Zero(d, d);
  a = Mat::Zero(d, d);
  H = Mat::Zero(d, d);
  V = 0.0;
  grad_V = Vec::Zero(d);
  for (int j = 0; j < kMaxDim; ++j) {
    grad_a[j] = Mat::Zero(d, d);
    grad_H[j] = Mat::Zero(d, d);
  }
  dt_a = Mat::Zero(d, d);
  dt_H = Mat::Zero(d, d);
}

void ControlEval::resize(int d) {
  sigma_tilde = Mat::Zero(d, d);
  a_tilde = Mat::Zero(d, d);
  for (int j = 0; j < kMaxDim; ++j) grad_a_tilde[j] = Mat::Zero(d, d);
}

void ControlConstants::check() const {
  const double all[] = {m, M, C1_H, C2_H, C2_a};
  for (double c : all)
    if (!std::isfinite(c) || c < 0.0) throw ConfigError("control constants must be finite and nonnegative");
  if (!(m > 0.0)) throw ConfigError("control constant m must be positive");
  if (m > M) throw ConfigError("control constants require m <= M");
}

double CoefficientField::potential(const Vec& x) const {
  PointEval p;
  evaluate(0.0, x, p);
  return p.V;
}

Vec CoefficientField::drift_bias() const { return Vec::Zero(dim()); }

Mat CoefficientField::sigma(double t, const Vec& x) const {
  PointEval p;
  evaluate(t, x, p);
  return p.sigma;
}

Mat CoefficientField::sigma_tilde(const Vec& x) const {
  ControlEval c;
  evaluate_control(x, c);
  return c.sigma_tilde;
}

Mat CoefficientField::stream(double t, const Vec& x) const {
  PointEval p;
  evaluate(t, x, p);
  return p.H;
}

MediumInstance::MediumInstance(std::shared_ptr<const CoefficientField> field, std::string id)
    : field_(std::move(field)), id_(std::move(id)) {
  if (!field_) throw ConfigError("medium instance needs a coefficient field");
  x0_ = Vec::Zero(field_->dim());
}

MediumInstance MediumInstance::shifted(double s, const Vec& y) const {
  MediumInstance out = *this;
  out.t0_ = t0_ + s;
  out.x0_ = x0_ + y;
  return out;
}

void MediumInstance::evaluate(double t, const Vec& x, PointEval& out) const {
  field_->evaluate(t + t0_, x + x0_, out);
}

void MediumInstance::evaluate_control(const Vec& x, ControlEval& out) const {
  field_->evaluate_control(x + x0_, out);
}

double MediumInstance::potential(const Vec& x) const { return field_->potential(x + x0_); }

}  // namespace homlab
