#include "homlab/corrector.hpp"

#include "homlab/errors.hpp"
#include "homlab/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace homlab {

// ---------------------------------------------------------------------------
// Cell discretization

CellDiscretization::CellDiscretization(const MediumInstance& medium, GridShape shape)
    : medium_(medium), shape_(std::move(shape)) {
  shape_.validate();
  d_ = shape_.dim();
  if (d_ != medium_.dim()) throw ConfigError("grid dimension does not match the medium");
  size_ = shape_.size();
  const int K = corners();

  w_.resize(static_cast<Eigen::Index>(size_));
  Vec x(d_);
  for (std::size_t n = 0; n < size_; ++n) {
    const auto m = shape_.multi_index(n);
    for (int i = 0; i < d_; ++i) x(i) = m[i + 1] * shape_.spacing(i + 1);
    w_[n] = std::exp(-2.0 * medium_.potential(x));
  }
  Z_ = w_.mean();
  pw_ = w_ / (static_cast<double>(size_) * Z_);

  Q_.resize(size_);
  a_.resize(size_);
  at_.resize(size_);
  sigma_.resize(size_);
  wc_.resize(size_);
  corner_index_.resize(size_ * K);
  min_eig_a_ = std::numeric_limits<double>::infinity();
  PointEval p;
  ControlEval c;
  std::vector<int> mk(d_ + 1);
  for (std::size_t n = 0; n < size_; ++n) {
    const auto m = shape_.multi_index(n);
    const double t = m[0] * shape_.spacing(0);
    for (int i = 0; i < d_; ++i) x(i) = (m[i + 1] + 0.5) * shape_.spacing(i + 1);
    medium_.evaluate(t, x, p);
    medium_.evaluate_control(x, c);
    Q_[n] = p.a - p.H;
    a_[n] = p.a;
    at_[n] = c.a_tilde;
    sigma_[n] = p.sigma;
    wc_[n] = std::exp(-2.0 * p.V);
    min_eig_a_ = std::min(min_eig_a_, min_symmetric_eigenvalue(p.a));
    for (int k = 0; k < K; ++k) {
      mk[0] = m[0];
      for (int i = 0; i < d_; ++i) mk[i + 1] = m[i + 1] + ((k >> i) & 1);
      corner_index_[n * K + k] = shape_.index(mk);
    }
  }
}

CellDiscretization CellDiscretization::for_medium(const MediumInstance& medium, const std::vector<int>& n) {
  const auto geo = medium.field().geometry();
  if (!geo.periodic()) throw ConfigError("the corrector needs a periodic (or periodized) medium");
  if (static_cast<int>(n.size()) != medium.dim() + 1)
    throw ConfigError("corrector grid must list N_t followed by one size per space axis");
  return CellDiscretization(medium, GridShape{n, *geo.periods});
}

std::size_t CellDiscretization::corner(std::size_t cube, int k) const { return corner_index_[cube * corners() + k]; }

Vec CellDiscretization::corner_gradient(const Eigen::VectorXd& phi, std::size_t cube, int k) const {
  Vec g(d_);
  for (int i = 0; i < d_; ++i) {
    const int hi = k | (1 << i), lo = k & ~(1 << i);
    g(i) = (phi[corner(cube, hi)] - phi[corner(cube, lo)]) / shape_.spacing(i + 1);
  }
  return g;
}

double CellDiscretization::inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
  return (pw_.array() * f.array() * g.array()).sum();
}

double CellDiscretization::mean(const Eigen::VectorXd& f) const { return pw_.dot(f); }

// ---------------------------------------------------------------------------
// Operator

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Scatters 1/2 scale sum_k D^k^T M D^k for every cube.
void add_flux(const CellDiscretization& disc, bool control, Triplets& trip) {
  const int d = disc.dim(), K = disc.corners();
  const double base = 0.5 / (static_cast<double>(disc.size()) * disc.normalization() * K);
  std::vector<double> h(d);
  for (int i = 0; i < d; ++i) h[i] = disc.shape().spacing(i + 1);
  Eigen::MatrixXd D(d, K), local(K, K);
  for (std::size_t c = 0; c < disc.size(); ++c) {
    const Mat& M = control ? disc.a_tilde(c) : disc.Q(c);
    local.setZero();
    for (int k = 0; k < K; ++k) {
      D.setZero();
      for (int i = 0; i < d; ++i) {
        D(i, k | (1 << i)) += 1.0 / h[i];
        D(i, k & ~(1 << i)) -= 1.0 / h[i];
      }
      local.noalias() += D.transpose() * M * D;
    }
    const double s = base * disc.cube_weight(c);
    for (int r = 0; r < K; ++r)
      for (int q = 0; q < K; ++q)
        if (local(r, q) != 0.0) trip.emplace_back(disc.corner(c, r), disc.corner(c, q), s * local(r, q));
  }
}

}  // namespace

DiscreteOperator::DiscreteOperator(const CellDiscretization& disc, OperatorSpec spec, bool control)
    : disc_(&disc), spec_(spec) {
  if (!(spec_.lambda >= 0.0) || !std::isfinite(spec_.lambda)) throw ConfigError("lambda must be finite and >= 0");
  if (!(spec_.delta >= 0.0) || !std::isfinite(spec_.delta)) throw ConfigError("delta must be finite and >= 0");
  if (spec_.theta != 0 && spec_.theta != 1) throw ConfigError("theta must be 0 or 1");

  const auto N = disc.size();
  const auto S = disc.shape().spatial_size();
  const int Nt = disc.shape().n[0];
  const double ht = disc.shape().spacing(0);
  const auto& pw = disc.pi_weight();

  Triplets trip;
  trip.reserve(N * (1 + disc.corners() * disc.corners() + 4));
  for (std::size_t n = 0; n < N; ++n) trip.emplace_back(n, n, spec_.lambda * pw[n]);
  add_flux(disc, control, trip);

  if (!control && Nt > 1) {
    for (std::size_t n = 0; n < N; ++n) {
      const std::size_t it = n / S;
      const std::size_t up = ((it + 1) % Nt) * S + n % S;
      const std::size_t down = ((it + Nt - 1) % Nt) * S + n % S;
      if (spec_.theta == 1) {
        const double c = pw[n] / (2.0 * ht);
        trip.emplace_back(n, up, -c);
        trip.emplace_back(n, down, c);
      }
      if (spec_.delta > 0.0) {
        const double c = 0.5 * spec_.delta * pw[n] / (ht * ht);
        trip.emplace_back(n, n, c);
        trip.emplace_back(up, up, c);
        trip.emplace_back(n, up, -c);
        trip.emplace_back(up, n, -c);
      }
    }
  }

  B_.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  B_.setFromTriplets(trip.begin(), trip.end());
  B_.makeCompressed();
  const SparseMatrix Bt = B_.transpose();
  symmetric_ = (B_ - Bt).norm() <= 1e-14 * B_.norm();
}

Eigen::VectorXd DiscreteOperator::apply(const Eigen::VectorXd& phi) const {
  return (B_ * phi).cwiseQuotient(disc_->pi_weight());
}

double DiscreteOperator::bilinear(const Eigen::VectorXd& phi, const Eigen::VectorXd& psi) const {
  return psi.dot(B_ * phi);
}

DiscreteOperator assemble_apply(const CellDiscretization& disc, double lambda, double delta, int theta) {
  return DiscreteOperator(disc, OperatorSpec{lambda, delta, theta});
}

DiscreteOperator assemble_control(const CellDiscretization& disc, double lambda) {
  return DiscreteOperator(disc, OperatorSpec{lambda, 0.0, 0}, true);
}

// ---------------------------------------------------------------------------
// Linear solves

namespace {

template <class Solver>
bool iterate(Solver& solver, const SparseMatrix& B, const Eigen::VectorXd& f, const SolverSettings& st,
             double target, double fnorm, const std::function<double(const Eigen::VectorXd&)>& pi_residual,
             SolveResult& res) {
  solver.compute(B);
  if (solver.info() != Eigen::Success) return false;
  double best = pi_residual(res.u);
  double tol = std::max(st.rtol * 1e-2, 1e-16);
  while (res.iterations < st.max_iter) {
    solver.setMaxIterations(std::min(st.chunk, st.max_iter - res.iterations));
    solver.setTolerance(tol);
    const Eigen::VectorXd u = solver.solveWithGuess(f, res.u);
    res.iterations += static_cast<int>(std::max<Eigen::Index>(solver.iterations(), 1));
    const double r = u.allFinite() ? pi_residual(u) : std::numeric_limits<double>::infinity();
    res.history.push_back(r / fnorm);
    const double previous = best;
    if (r < best) {
      best = r;
      res.u = u;
    }
    if (best <= target) {
      res.residual = best / fnorm;
      return true;
    }
    if (solver.info() == Eigen::Success) {
      tol *= 0.1;
      if (tol < 1e-17) return false;
    } else if (!(best < 0.9 * previous)) {
      return false;
    }
  }
  return false;
}

}  // namespace

SolveResult solve_weak(const DiscreteOperator& op, const Eigen::VectorXd& f, const SolverSettings& st,
                       const Eigen::VectorXd* guess) {
  const auto& B = op.weak_matrix();
  const auto& pw = op.discretization().pi_weight();
  const auto pi_residual = [&](const Eigen::VectorXd& u) {
    const Eigen::VectorXd r = f - B * u;
    return std::sqrt((r.array().square() / pw.array()).sum());
  };
  const double fnorm = std::sqrt((f.array().square() / pw.array()).sum());

  SolveResult res;
  res.u = guess && guess->size() == f.size() ? *guess : Eigen::VectorXd::Zero(f.size());
  if (fnorm == 0.0) {
    res.u.setZero();
    res.method = "trivial";
    return res;
  }
  const double target = st.rtol * fnorm;
  const double r0 = pi_residual(res.u);
  res.history.push_back(r0 / fnorm);
  if (r0 <= target) {
    res.residual = r0 / fnorm;
    res.method = "initial guess";
    return res;
  }

  if (op.symmetric()) {
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
    if (iterate(cg, B, f, st, target, fnorm, pi_residual, res)) {
      res.method = "cg+jacobi";
      return res;
    }
  } else {
    Eigen::BiCGSTAB<SparseMatrix, Eigen::DiagonalPreconditioner<double>> bicg;
    if (iterate(bicg, B, f, st, target, fnorm, pi_residual, res)) {
      res.method = "bicgstab+jacobi";
      return res;
    }
  }

  {
    Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>> ilut;
    ilut.preconditioner().setDroptol(1e-6);
    ilut.preconditioner().setFillfactor(20);
    if (iterate(ilut, B, f, st, target, fnorm, pi_residual, res)) {
      res.method = "bicgstab+ilut";
      return res;
    }
  }

  const Eigen::SparseMatrix<double> Bc = B;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(Bc);
  if (lu.info() == Eigen::Success) {
    Eigen::VectorXd u = lu.solve(f);
    for (int refine = 0; refine < 3 && u.allFinite(); ++refine) {
      const double r = pi_residual(u);
      res.history.push_back(r / fnorm);
      if (r <= target) {
        res.u = u;
        res.residual = r / fnorm;
        res.method = "sparse-lu";
        return res;
      }
      u += lu.solve(f - B * u);
    }
  }
  std::ostringstream os;
  os << "linear solve did not reach rtol " << st.rtol << " (best relative residual "
     << (res.history.empty() ? 0.0 : *std::min_element(res.history.begin(), res.history.end())) << ")";
  throw SolverError(os.str(), res.history);
}

// ---------------------------------------------------------------------------
// Corrector

Eigen::VectorXd drift_rhs_weak(const CellDiscretization& disc, int i) {
  const int d = disc.dim(), K = disc.corners();
  if (i < 0 || i >= d) throw ConfigError("corrector coordinate out of range");
  const double base = -0.5 / (static_cast<double>(disc.size()) * disc.normalization() * K);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(disc.size()));
  for (std::size_t c = 0; c < disc.size(); ++c) {
    const Mat& Q = disc.Q(c);
    const double s = base * disc.cube_weight(c);
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < d; ++j) {
        const double v = s * Q(j, i) / disc.shape().spacing(j + 1);
        f[disc.corner(c, k | (1 << j))] += v;
        f[disc.corner(c, k & ~(1 << j))] -= v;
      }
  }
  return f;
}

GridFunction drift_grid(const CellDiscretization& disc, int i) {
  GridFunction b(disc.shape());
  b.values = drift_rhs_weak(disc, i).cwiseQuotient(disc.pi_weight());
  return b;
}

Eigen::VectorXd sigma_gradient(const CellDiscretization& disc, const Eigen::VectorXd& u) {
  const int d = disc.dim(), K = disc.corners();
  Eigen::VectorXd xi(static_cast<Eigen::Index>(disc.size() * K * d));
  for (std::size_t c = 0; c < disc.size(); ++c)
    for (int k = 0; k < K; ++k) xi.segment((c * K + k) * d, d) = disc.sigma(c).transpose() * disc.corner_gradient(u, c, k);
  return xi;
}

Norms discrete_norms(const CellDiscretization& disc, const Eigen::VectorXd& u) {
  const int K = disc.corners();
  const double base = 0.5 / (static_cast<double>(disc.size()) * disc.normalization() * K);
  double h1 = 0.0;
  for (std::size_t c = 0; c < disc.size(); ++c) {
    double s = 0.0;
    for (int k = 0; k < K; ++k) {
      const Vec g = disc.corner_gradient(u, c, k);
      s += g.dot(disc.a_tilde(c) * g);
    }
    h1 += disc.cube_weight(c) * s;
  }
  return {std::sqrt(disc.inner(u, u)), std::sqrt(std::max(0.0, base * h1))};
}

double corner_field_norm(const CellDiscretization& disc, const Eigen::VectorXd& field) {
  const int d = disc.dim(), K = disc.corners();
  double s = 0.0;
  for (std::size_t c = 0; c < disc.size(); ++c)
    s += disc.cube_weight(c) * field.segment(c * K * d, K * d).squaredNorm();
  return std::sqrt(s / (static_cast<double>(disc.size()) * disc.normalization() * K));
}

CorrectorSolution solve_resolvent(const CellDiscretization& disc, const Eigen::VectorXd& h, double lambda,
                                  double delta, int theta, const SolverSettings& settings,
                                  const Eigen::VectorXd* guess) {
  if (!(lambda > 0.0)) throw ConfigError("the resolvent needs lambda > 0");
  if (h.size() != static_cast<Eigen::Index>(disc.size())) throw ConfigError("right-hand side does not match the grid");
  const DiscreteOperator op = assemble_apply(disc, lambda, delta, theta);
  const Eigen::VectorXd f = h.cwiseProduct(disc.pi_weight());
  SolveResult sr = solve_weak(op, f, settings, guess);

  CorrectorSolution s;
  s.lambda = lambda;
  s.delta = delta;
  s.theta = theta;
  s.u = GridFunction(disc.shape());
  s.u.values = std::move(sr.u);
  s.grad_sigma_u = sigma_gradient(disc, s.u.values);
  s.residual_norm = sr.residual;
  s.iterations = sr.iterations;
  s.method = sr.method;
  s.residual_history = std::move(sr.history);
  const Norms nm = discrete_norms(disc, s.u.values);
  s.l2 = nm.l2;
  s.h1 = nm.h1_tilde;
  s.rhs_l2 = std::sqrt(disc.inner(h, h));
  const double m = disc.medium().field().control_constants().m;
  s.energy_lhs = lambda * s.l2 * s.l2 + m * s.h1 * s.h1;
  s.energy_rhs = s.rhs_l2 * s.rhs_l2 / lambda;
  s.energy_ok = s.energy_lhs <= s.energy_rhs * (1.0 + 1e-8) + 1e-300;
  return s;
}

CorrectorSolution solve_corrector(const CellDiscretization& disc, int i, double lambda, double delta, int theta,
                                  const SolverSettings& settings, const Eigen::VectorXd* guess) {
  CorrectorSolution s = solve_resolvent(disc, drift_grid(disc, i).values, lambda, delta, theta, settings, guess);
  s.coordinate = i;
  return s;
}

double h_minus_one_norm(const CellDiscretization& disc, const Eigen::VectorXd& h, const SolverSettings& settings) {
  const double scale = std::max(1.0, std::sqrt(disc.inner(h, h)));
  const double mean = disc.mean(h);
  if (std::abs(mean) > 1e-10 * scale)
    throw NumericalError("H^-1 norm needs pi(h) = 0 (got " + std::to_string(mean) + ")");
  const Eigen::VectorXd hc = h.array() - mean;
  // Roundoff-level input, e.g. the drift of a stripe of a single color.
  if (std::sqrt(disc.inner(hc, hc)) <= 1e-12) return 0.0;
  const DiscreteOperator op = assemble_control(disc, 1e-10);
  const SolveResult sr = solve_weak(op, hc.cwiseProduct(disc.pi_weight()), settings);
  return std::sqrt(std::max(0.0, disc.inner(sr.u, hc)));
}

Extrapolation extrapolate_gradient(const CellDiscretization& disc, const std::vector<CorrectorSolution>& sols) {
  if (sols.size() < 3) throw ConfigError("extrapolation needs at least 3 solutions");
  for (std::size_t k = 1; k < sols.size(); ++k) {
    if (sols[k].coordinate != sols[0].coordinate) throw ConfigError("extrapolation mixes coordinates");
    if (!(sols[k].lambda < sols[k - 1].lambda)) throw ConfigError("extrapolation needs decreasing lambdas");
  }
  const double ratio = sols[1].lambda / sols[0].lambda;
  for (std::size_t k = 2; k < sols.size(); ++k)
    if (std::abs(sols[k].lambda / sols[k - 1].lambda - ratio) > 1e-6 * ratio)
      throw ConfigError("extrapolation needs a geometric lambda sequence");

  Extrapolation ex;
  for (const auto& s : sols) ex.lambda_u2.push_back(s.lambda * s.l2 * s.l2);
  for (std::size_t k = 1; k < ex.lambda_u2.size(); ++k)
    if (!(ex.lambda_u2[k] < ex.lambda_u2[k - 1])) ex.lambda_u2_decreasing = false;
  // A vanishing drift gives u = 0 up to roundoff.
  const double zero_floor = 1e-24 * std::max(1.0, sols.front().rhs_l2 * sols.front().rhs_l2);
  if (std::all_of(ex.lambda_u2.begin(), ex.lambda_u2.end(), [&](double v) { return v <= zero_floor; }))
    ex.lambda_u2_decreasing = true;

  for (std::size_t k = 1; k < sols.size(); ++k)
    ex.gradient_differences.push_back(corner_field_norm(disc, sols[k].grad_sigma_u - sols[k - 1].grad_sigma_u));

  const auto& last = sols.back();
  const auto& prev = sols[sols.size() - 2];
  const double floor = 1e-10 * (1.0 + corner_field_norm(disc, last.grad_sigma_u));
  const auto& gd = ex.gradient_differences;
  for (std::size_t k = 1; k < gd.size(); ++k)
    if (gd[k] > gd[k - 1] * (1.0 + 1e-6) + floor) {
      std::ostringstream os;
      os << "gradient differences grow along the lambda sequence (" << gd[k - 1] << " -> " << gd[k]
         << "): under-resolved grid or assumption violation";
      throw NumericalError(os.str());
    }

  const double w = last.lambda / (prev.lambda - last.lambda);
  const Eigen::VectorXd correction = w * (last.grad_sigma_u - prev.grad_sigma_u);
  ex.xi = last.grad_sigma_u + correction;
  ex.error_estimate = corner_field_norm(disc, correction);
  return ex;
}

EffectiveDiffusivity effective_matrix(const CellDiscretization& disc, const std::vector<Eigen::VectorXd>& xi) {
  const int d = disc.dim(), K = disc.corners();
  if (static_cast<int>(xi.size()) != d) throw ConfigError("effective matrix needs one gradient field per coordinate");
  for (const auto& x : xi)
    if (x.size() != static_cast<Eigen::Index>(disc.size() * K * d))
      throw ConfigError("gradient field does not match the grid");
  Mat A = Mat::Zero(d, d);
  Mat F(d, d);  // column i: sigma^T e_i + xi^i
  for (std::size_t c = 0; c < disc.size(); ++c) {
    const Mat st = disc.sigma(c).transpose();
    Mat local = Mat::Zero(d, d);
    for (int k = 0; k < K; ++k) {
      for (int i = 0; i < d; ++i) F.col(i) = st.col(i) + xi[i].segment((c * K + k) * d, d);
      local.noalias() += F.transpose() * F;
    }
    A += disc.cube_weight(c) * local;
  }
  A /= static_cast<double>(disc.size()) * disc.normalization() * K;
  EffectiveDiffusivity out;
  out.A = 0.5 * (A + A.transpose());
  out.method = "corrector";
  out.ci = Mat::Zero(d, d);
  return out;
}

// ---------------------------------------------------------------------------
// Study

void CorrectorConfig::validate(int d) const {
  if (static_cast<int>(grid.size()) != d + 1) throw ConfigError("corrector.grid must list N_t and one size per space axis");
  if (lambdas.size() < 3) throw ConfigError("corrector.lambdas needs at least 3 values");
  for (double l : lambdas)
    if (!(l > 0.0)) throw ConfigError("corrector.lambdas must be positive");
  if (!(delta0 > 0.0)) throw ConfigError("corrector.delta0 must be positive");
  if (delta_levels < 0) throw ConfigError("corrector.delta_levels must be >= 0");
  if (!(final_delta >= 0.0)) throw ConfigError("corrector.final_delta must be >= 0");
  if (theta != 0 && theta != 1) throw ConfigError("corrector.theta must be 0 or 1");
  if (!(solver.rtol > 0.0) || solver.max_iter < 1 || solver.chunk < 1)
    throw ConfigError("corrector solver settings must be positive");
}

CorrectorStudy run_corrector(const MediumInstance& medium, const CorrectorConfig& config, int workers) {
  config.validate(medium.dim());
  const CellDiscretization disc = CellDiscretization::for_medium(medium, config.grid);
  const int d = disc.dim();

  CorrectorStudy study;
  study.shape = disc.shape();
  study.constants = medium.field().control_constants();
  study.min_eigenvalue_a = disc.min_eigenvalue_a();
  study.coordinates.resize(d);
  std::vector<int> energy(d, 1);

  std::vector<double> deltas;
  for (int k = 0; k < config.delta_levels; ++k) deltas.push_back(config.delta0 / std::pow(4.0, k));

  parallel_for(static_cast<std::size_t>(d), static_cast<unsigned>(std::max(1, workers)), [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    CoordinateStudy& cs = study.coordinates[i];
    cs.coordinate = i;
    cs.continuation_deltas = deltas;
    Eigen::VectorXd warm;
    for (double lambda : config.lambdas) {
      std::vector<double> diffs;
      Eigen::VectorXd previous;
      for (double delta : deltas) {
        const CorrectorSolution s =
            solve_corrector(disc, i, lambda, delta, config.theta, config.solver, warm.size() ? &warm : nullptr);
        if (!s.energy_ok) energy[i] = 0;
        if (previous.size()) diffs.push_back(discrete_norms(disc, s.u.values - previous).h1_tilde);
        previous = s.u.values;
        warm = s.u.values;
      }
      CorrectorSolution fin =
          solve_corrector(disc, i, lambda, config.final_delta, config.theta, config.solver, warm.size() ? &warm : nullptr);
      if (!fin.energy_ok) energy[i] = 0;
      warm = fin.u.values;
      const double floor = 1e-8 * std::max(1.0, fin.h1);
      for (std::size_t k = 1; k < diffs.size(); ++k)
        if (!(diffs[k] < diffs[k - 1]) && diffs[k] > floor) cs.continuation_monotone = false;
      cs.continuation.push_back(std::move(diffs));
      cs.solutions.push_back(std::move(fin));
    }
    cs.extrapolation = extrapolate_gradient(disc, cs.solutions);
    cs.time_variation = cs.solutions.back().u.max_time_variation();

    cs.drift_h_minus_one = h_minus_one_norm(disc, drift_grid(disc, i).values, config.solver);
    double at_ii = 0.0;
    for (std::size_t c = 0; c < disc.size(); ++c) at_ii += disc.cube_weight(c) * disc.a_tilde(c)(i, i);
    at_ii /= static_cast<double>(disc.size()) * disc.normalization();
    cs.drift_bound = (study.constants.M + study.constants.C1_H) * std::sqrt(at_ii);
  });

  std::vector<Eigen::VectorXd> xi, xi_last;
  for (const auto& cs : study.coordinates) {
    xi.push_back(cs.extrapolation.xi);
    xi_last.push_back(cs.solutions.back().grad_sigma_u);
    study.continuation_ok = study.continuation_ok && cs.continuation_monotone;
    study.lambda_u2_decreasing = study.lambda_u2_decreasing && cs.extrapolation.lambda_u2_decreasing;
    if (cs.drift_h_minus_one > 1.05 * cs.drift_bound)
      study.warnings.push_back("drift H^-1 norm of coordinate " + std::to_string(cs.coordinate + 1) +
                               " exceeds (M + C1_H) (a~ E_i, E_i)^1/2 by more than 5%");
  }
  study.energy_ok = std::all_of(energy.begin(), energy.end(), [](int e) { return e == 1; });
  study.A = effective_matrix(disc, xi);
  study.A_last_lambda = effective_matrix(disc, xi_last);
  study.A.ci = (study.A.A - study.A_last_lambda.A).cwiseAbs();
  study.A.check();
  if (!study.energy_ok) study.warnings.push_back("energy estimate violated on at least one solve");
  if (!study.lambda_u2_decreasing) study.warnings.push_back("lambda |u_lambda|^2 is not strictly decreasing");
  if (!study.continuation_ok) study.warnings.push_back("delta continuation differences are not decreasing");
  return study;
}

}  // namespace homlab
