#pragma once

#include "homlab/coefficient_field.hpp"

#include <string>
#include <vector>

namespace homlab {

/// Tensor sample of (t, x) points: `resolution` points per axis on [lo, hi).
struct SampleGrid {
  int resolution = 8;
  std::vector<double> lo;  // time first
  std::vector<double> hi;

  /// One period cell for periodic media, the central half of the sampled
  /// box for chessboard media.
  static SampleGrid for_medium(const MediumInstance& medium, int resolution);
};

struct InequalityMargin {
  std::string name;  // e.g. "a - m a~"
  double margin = 0.0;  // min over points and directions of the quadratic form
  bool passed = true;
};

struct ControlReport {
  std::vector<InequalityMargin> margins;
  /// Smallest admissible constants seen on the grid (infinite when a~
  /// vanishes in a direction where the controlled quantity does not).
  ControlConstants estimated;
  double max_antisymmetry_defect = 0.0;
  double min_eigenvalue_a = 0.0;
  double min_eigenvalue_a_tilde = 0.0;
  std::size_t points = 0;
  bool passed = true;
};

/// Checks m a~ <= a <= M a~, |H| <= C1_H a~, |D_t H| <= C2_H a~ and
/// |D_t a| <= C2_a a~ in the quadratic-form sense over a fixed direction set.
ControlReport validate_control(const MediumInstance& medium, const ControlConstants& constants,
                               const SampleGrid& grid);

/// Unit directions used by the checks: 1 in d = 1, 64 angles in d = 2,
/// 128 spiral points in d = 3.
std::vector<Vec> direction_set(int d);

}  // namespace homlab
