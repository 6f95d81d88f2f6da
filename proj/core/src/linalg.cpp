#include "homlab/linalg.hpp"

#include "homlab/effective.hpp"
#include "homlab/errors.hpp"

#include <Eigen/Eigenvalues>

#include <limits>

namespace homlab {

Mat matrix_abs(const Mat& A) {
  const Mat AtA = A.transpose() * A;
  const Eigen::SelfAdjointEigenSolver<Mat> eig(AtA);
  const Vec root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

double antisymmetry_defect(const Mat& A) {
  if (A.size() == 0) return 0.0;
  return (A + A.transpose()).cwiseAbs().maxCoeff();
}

double min_symmetric_eigenvalue(const Mat& A) {
  const Mat S = 0.5 * (A + A.transpose());
  return Eigen::SelfAdjointEigenSolver<Mat>(S, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

void EffectiveDiffusivity::check() const {
  if (A.rows() != A.cols() || A.size() == 0) throw NumericalError("effective matrix must be square and nonempty");
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-10) throw NumericalError("effective matrix is not symmetric");
  if (min_symmetric_eigenvalue(A) < -1e-10) throw NumericalError("effective matrix is not positive semidefinite");
}

double relative_frobenius_error(const Mat& A, const Mat& reference) {
  if (A.rows() != reference.rows() || A.cols() != reference.cols())
    throw ConfigError("matrices to compare must have the same shape");
  const double ref = reference.norm();
  const double diff = (A - reference).norm();
  if (ref == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / ref;
}

}  // namespace homlab
