#pragma once

#include "homlab/coefficient_field.hpp"

namespace homlab {

/// b_i = sum_j (1/2 D_j a_ij - a_ij D_j V + 1/2 D_j H_ij) from a point evaluation.
Vec drift(const PointEval& p);

/// b~_i = sum_j (1/2 D_j a~_ij - a~_ij D_j V).
Vec control_drift(const ControlEval& c, const Vec& grad_V);

/// Drift of the medium at (t, x), including any diagnostic drift bias.
Vec drift(const MediumInstance& medium, double t, const Vec& x);

/// Drift of the control diffusion at x.
Vec control_drift(const MediumInstance& medium, const Vec& x);

}  // namespace homlab
