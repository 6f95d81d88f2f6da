#pragma once

#include <Eigen/Dense>

#include <array>

namespace homlab {

/// Largest spatial dimension supported by the stack-allocated point types.
inline constexpr int kMaxDim = 3;

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;

/// One matrix per spatial direction, e.g. the partials D_j a.
using MatGrad = std::array<Mat, kMaxDim>;

/// Positive square root of A^T A. For antisymmetric A this is sqrt(-A^2).
Mat matrix_abs(const Mat& A);

/// Largest |A + A^T| entry; zero for an exactly antisymmetric matrix.
double antisymmetry_defect(const Mat& A);

/// Smallest eigenvalue of the symmetric part of A.
double min_symmetric_eigenvalue(const Mat& A);

}  // namespace homlab
