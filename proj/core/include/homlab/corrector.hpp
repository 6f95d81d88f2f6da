#pragma once

#include "homlab/coefficient_field.hpp"
#include "homlab/effective.hpp"
#include "homlab/grid.hpp"

#include <Eigen/SparseCore>

#include <string>
#include <vector>

namespace homlab {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// A medium sampled on a periodic cell grid.
///
/// Space derivatives live on cubes: for the cube with lower corner m and
/// each corner k in {0,1}^d, g^k_i is the difference quotient along the cube
/// edge in direction i that passes through corner k. Coefficients of a cube
/// are taken at (t_n, cube center). Node weights are exp(-2V) and every
/// quadrature is normalized by Z = mean node weight.
class CellDiscretization {
 public:
  CellDiscretization(const MediumInstance& medium, GridShape shape);

  /// Grid over one period cell of a periodic medium with `n` (time first) nodes per axis.
  static CellDiscretization for_medium(const MediumInstance& medium, const std::vector<int>& n);

  const GridShape& shape() const noexcept { return shape_; }
  const MediumInstance& medium() const noexcept { return medium_; }
  int dim() const noexcept { return d_; }
  std::size_t size() const noexcept { return size_; }
  int corners() const noexcept { return 1 << d_; }

  const Eigen::VectorXd& node_weight() const noexcept { return w_; }
  double normalization() const noexcept { return Z_; }
  /// Quadrature weights of the pi inner product, w_n / (N Z).
  const Eigen::VectorXd& pi_weight() const noexcept { return pw_; }

  /// a - H, so that the flux term reads (Q grad phi) . grad psi.
  const Mat& Q(std::size_t cube) const { return Q_[cube]; }
  const Mat& a(std::size_t cube) const { return a_[cube]; }
  const Mat& a_tilde(std::size_t cube) const { return at_[cube]; }
  const Mat& sigma(std::size_t cube) const { return sigma_[cube]; }
  double cube_weight(std::size_t cube) const { return wc_[cube]; }

  /// Node index of corner k (bit i = offset along x_{i+1}) of a cube.
  std::size_t corner(std::size_t cube, int k) const;

  /// g^k(phi) on a cube.
  Vec corner_gradient(const Eigen::VectorXd& phi, std::size_t cube, int k) const;

  /// (f, g)_pi.
  double inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const;
  /// pi(f).
  double mean(const Eigen::VectorXd& f) const;

  /// Smallest eigenvalue of a over all cubes.
  double min_eigenvalue_a() const noexcept { return min_eig_a_; }

 private:
  MediumInstance medium_;
  GridShape shape_;
  int d_;
  std::size_t size_;
  Eigen::VectorXd w_, pw_;
  double Z_ = 1.0;
  std::vector<Mat> Q_, a_, at_, sigma_;
  std::vector<double> wc_;
  std::vector<std::size_t> corner_index_;  // cube * corners + k
  double min_eig_a_ = 0.0;
};

struct OperatorSpec {
  double lambda = 1.0;
  double delta = 0.0;
  int theta = 1;  // 0 or 1
};

/// The discrete operator lambda - L - theta D_t - (delta/2) D_t^2 with bilinear form
///   B_h(phi, psi) = lambda (phi, psi) + 1/2 (Q grad phi, grad psi)
///                   - theta (D_t phi, psi) + delta/2 (D_t^+ phi, D_t^+ psi),
/// D_t centered and D_t^+ forward. apply() = W^{-1} B, so that
/// (apply(phi), psi)_pi = B_h(phi, psi) up to roundoff.
class DiscreteOperator {
 public:
  /// `control` assembles lambda (phi, psi) + 1/2 (a~ grad phi, grad psi) instead.
  DiscreteOperator(const CellDiscretization& disc, OperatorSpec spec, bool control = false);

  Eigen::VectorXd apply(const Eigen::VectorXd& phi) const;
  double bilinear(const Eigen::VectorXd& phi, const Eigen::VectorXd& psi) const;

  /// Row r holds B_h(e_c, e_r) in column c.
  const SparseMatrix& weak_matrix() const noexcept { return B_; }
  bool symmetric() const noexcept { return symmetric_; }
  const OperatorSpec& spec() const noexcept { return spec_; }
  const CellDiscretization& discretization() const noexcept { return *disc_; }

 private:
  const CellDiscretization* disc_;
  OperatorSpec spec_;
  SparseMatrix B_;
  bool symmetric_ = false;
};

DiscreteOperator assemble_apply(const CellDiscretization& disc, double lambda, double delta, int theta);

/// lambda (phi, psi) + 1/2 (a~ grad phi, grad psi), the discrete lambda - S~.
DiscreteOperator assemble_control(const CellDiscretization& disc, double lambda);

struct SolverSettings {
  double rtol = 1e-9;
  int max_iter = 20000;
  int chunk = 400;
};

struct SolveResult {
  Eigen::VectorXd u;
  double residual = 0.0;  // pi-norm of the strong residual, relative to the rhs
  int iterations = 0;
  std::string method;
  std::vector<double> history;
};

/// Solves B u = f (weak form). Krylov first (CG if symmetric, BiCGSTAB
/// otherwise, diagonal preconditioner), then ILUT-preconditioned BiCGSTAB,
/// then sparse LU. Throws SolverError with the residual history.
SolveResult solve_weak(const DiscreteOperator& op, const Eigen::VectorXd& f, const SolverSettings& settings,
                       const Eigen::VectorXd* guess = nullptr);

/// Weak right-hand side (b_i, psi)_pi with b_i = L_h x_i, the conservative
/// discrete drift.
Eigen::VectorXd drift_rhs_weak(const CellDiscretization& disc, int i);

/// The discrete drift b_i as a grid function.
GridFunction drift_grid(const CellDiscretization& disc, int i);

struct CorrectorSolution {
  int coordinate = 0;  // 0-based
  double lambda = 0.0;
  double delta = 0.0;
  int theta = 1;
  GridFunction u;
  /// sigma^T g^k(u) per cube corner, at ((cube * corners + k) * d + j).
  Eigen::VectorXd grad_sigma_u;
  double residual_norm = 0.0;
  int iterations = 0;
  std::string method;
  std::vector<double> residual_history;
  double l2 = 0.0;
  double h1 = 0.0;
  double rhs_l2 = 0.0;
  /// lambda |u|^2 + m ||u||_1^2 and |h|^2 / lambda.
  double energy_lhs = 0.0;
  double energy_rhs = 0.0;
  bool energy_ok = true;
};

/// Solves B(u, psi) = (h, psi)_pi for a strong right-hand side h.
CorrectorSolution solve_resolvent(const CellDiscretization& disc, const Eigen::VectorXd& h, double lambda,
                                  double delta, int theta, const SolverSettings& settings,
                                  const Eigen::VectorXd* guess = nullptr);

/// The corrector u_lambda for coordinate i (0-based).
CorrectorSolution solve_corrector(const CellDiscretization& disc, int i, double lambda, double delta, int theta,
                                  const SolverSettings& settings, const Eigen::VectorXd* guess = nullptr);

/// sigma^T g^k(u) on every cube corner.
Eigen::VectorXd sigma_gradient(const CellDiscretization& disc, const Eigen::VectorXd& u);

struct Norms {
  double l2 = 0.0;
  double h1_tilde = 0.0;  // sqrt(1/2 (a~ grad u, grad u)_pi)
};

Norms discrete_norms(const CellDiscretization& disc, const Eigen::VectorXd& u);

/// pi-weighted L2 norm of a cube-corner vector field.
double corner_field_norm(const CellDiscretization& disc, const Eigen::VectorXd& field);

/// sqrt((w, h)_pi) with (lambda0 - S~) w = h, lambda0 tiny. Throws
/// NumericalError when |pi(h)| > 1e-10 max(1, |h|_pi).
double h_minus_one_norm(const CellDiscretization& disc, const Eigen::VectorXd& h, const SolverSettings& settings = {});

struct Extrapolation {
  Eigen::VectorXd xi;
  double error_estimate = 0.0;
  std::vector<double> lambda_u2;
  bool lambda_u2_decreasing = true;
  std::vector<double> gradient_differences;
};

/// Linear-in-lambda Richardson extrapolation of sigma^T grad u_lambda from
/// the last two solutions of a geometric lambda sequence. Throws
/// NumericalError if the gradient differences grow.
Extrapolation extrapolate_gradient(const CellDiscretization& disc, const std::vector<CorrectorSolution>& solutions);

/// A_ij = (sigma + xi*)(sigma + xi*)* integrated against pi, symmetrized.
EffectiveDiffusivity effective_matrix(const CellDiscretization& disc, const std::vector<Eigen::VectorXd>& xi);

struct CorrectorConfig {
  std::vector<int> grid;  // N_t, N_1, ..., N_d
  std::vector<double> lambdas{1e-2, 1e-3, 1e-4};
  double delta0 = 0.1;
  int delta_levels = 4;
  double final_delta = 0.0;
  int theta = 1;
  SolverSettings solver;

  void validate(int d) const;
};

struct CoordinateStudy {
  int coordinate = 0;
  std::vector<CorrectorSolution> solutions;  // one per lambda, at final_delta
  /// Per lambda: ||u_{lambda,delta_k} - u_{lambda,delta_{k+1}}||_1 along the delta schedule.
  std::vector<std::vector<double>> continuation;
  std::vector<double> continuation_deltas;
  bool continuation_monotone = true;
  Extrapolation extrapolation;
  double drift_h_minus_one = 0.0;
  double drift_bound = 0.0;  // (M + C1_H) (a~ E_i, E_i)^{1/2}
  double time_variation = 0.0;
};

struct CorrectorStudy {
  GridShape shape;
  ControlConstants constants;
  EffectiveDiffusivity A;
  EffectiveDiffusivity A_last_lambda;
  std::vector<CoordinateStudy> coordinates;
  double min_eigenvalue_a = 0.0;
  bool energy_ok = true;
  bool continuation_ok = true;
  bool lambda_u2_decreasing = true;
  std::vector<std::string> warnings;
};

/// Solves every coordinate over the lambda schedule, with delta continuation
/// at each lambda, and extrapolates A. Coordinates run on `workers` threads.
CorrectorStudy run_corrector(const MediumInstance& medium, const CorrectorConfig& config, int workers = 1);

}  // namespace homlab
