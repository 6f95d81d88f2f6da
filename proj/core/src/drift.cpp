#include "homlab/drift.hpp"

namespace homlab {

Vec drift(const PointEval& p) {
  const auto d = p.a.rows();
  Vec b = -p.a * p.grad_V;
  for (Eigen::Index j = 0; j < d; ++j) b += 0.5 * (p.grad_a[j].col(j) + p.grad_H[j].col(j));
  return b;
}

Vec control_drift(const ControlEval& c, const Vec& grad_V) {
  const auto d = c.a_tilde.rows();
  Vec b = -c.a_tilde * grad_V;
  for (Eigen::Index j = 0; j < d; ++j) b += 0.5 * c.grad_a_tilde[j].col(j);
  return b;
}

Vec drift(const MediumInstance& medium, double t, const Vec& x) {
  PointEval p;
  medium.evaluate(t, x, p);
  return drift(p) + medium.field().drift_bias();
}

Vec control_drift(const MediumInstance& medium, const Vec& x) {
  PointEval p;
  medium.evaluate(0.0, x, p);
  ControlEval c;
  medium.evaluate_control(x, c);
  return control_drift(c, p.grad_V);
}

}  // namespace homlab
