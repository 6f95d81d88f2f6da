#pragma once

#include "homlab/linalg.hpp"

#include <string>

namespace homlab {

/// Effective diffusivity with its provenance. `ci` holds per-entry CI
/// half-widths (Monte Carlo) or extrapolation error estimates (corrector).
struct EffectiveDiffusivity {
  Mat A;
  std::string method;  // "corrector" or "monte_carlo"
  Mat ci;

  /// Throws NumericalError unless A is symmetric within 1e-10 and its
  /// eigenvalues are >= -1e-10.
  void check() const;
};

/// sqrt(sum (A - B)^2) / sqrt(sum B^2); B is the reference.
double relative_frobenius_error(const Mat& A, const Mat& reference);

}  // namespace homlab
