#pragma once

#include "homlab/coefficient_field.hpp"

#include <functional>
#include <string>

namespace homlab {

/// A function f(t, x, omega) of the environment, evaluated from the
/// coefficient evaluation at the medium point (t, x).
struct Observable {
  std::string name;
  std::function<double(const PointEval&, double t, const Vec& x)> fn;
  bool constant = false;

  double operator()(const PointEval& p, double t, const Vec& x) const { return fn(p, t, x); }
};

/// Named observables: "one", "V", "a_ij" (1-based, e.g. "a_11"), "sin_xk"
/// (e.g. "sin_x1"). Throws ConfigError for unknown names or indices > d.
Observable make_observable(const std::string& name, int d);

/// f(Y) for the environment seen from (t, x): evaluates the medium at (t, x).
double observe(const MediumInstance& medium, const Observable& f, double t, const Vec& x);

/// pi(f) by tensor midpoint quadrature with `resolution` points per axis over
/// one period cell (time included); requires a periodic medium.
double pi_mean(const MediumInstance& medium, const Observable& f, int resolution);

}  // namespace homlab
