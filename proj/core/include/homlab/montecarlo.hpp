#pragma once

#include "homlab/coefficient_field.hpp"
#include "homlab/effective.hpp"
#include "homlab/observable.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace homlab {

struct EnsembleSpec {
  std::size_t n_paths = 1000;  // per medium
  std::size_t n_media = 1;
  double epsilon = 0.1;
  double T = 1.0;  // macroscopic horizon
  std::vector<double> observation_times{0.5, 1.0};
  std::uint64_t master_seed = 0;
  double dt = 1e-3;  // microscopic step
  /// Start every path from a pi-distributed medium shift.
  bool random_start = true;
  std::size_t batches = 20;

  /// Microscopic step index of each observation time.
  std::vector<std::size_t> observation_steps() const;
  void validate() const;
};

/// Builds medium number `index` of a family from its derived seed.
using MediumFamily = std::function<MediumInstance(std::size_t index, std::uint64_t seed)>;

/// Seed of medium number `index` in a family driven by `master_seed`.
std::uint64_t medium_seed(std::uint64_t master_seed, std::size_t index);

/// The family returning `medium` for every index.
MediumFamily fixed_medium(const MediumInstance& medium);

/// Rescaled positions Z_t = epsilon X_{t/epsilon^2} at the observation times.
struct Ensemble {
  int dim = 0;
  std::vector<double> times;
  /// Z of path p at time k, component i: Z[(p * times.size() + k) * dim + i].
  std::vector<double> Z;
  std::vector<std::size_t> medium_of_path;
  std::size_t attempted = 0;
  std::size_t failed = 0;
  std::vector<std::string> failures;  // first few messages

  std::size_t paths() const noexcept { return medium_of_path.size(); }
  double z(std::size_t path, std::size_t k, int i) const { return Z[(path * times.size() + k) * dim + i]; }
};

/// Simulates n_media * n_paths paths on `workers` threads. Path g of medium
/// m uses noise stream (derive_seed(master, noise), g) and start shift
/// (derive_seed(master, start), g); results do not depend on `workers`.
/// Throws NumericalError when more than 0.1% of the paths fail.
Ensemble simulate_ensemble(const MediumFamily& family, const EnsembleSpec& spec, int workers = 1);

struct TimeCovariance {
  double t = 0.0;
  Mat A;   // mean(Z Z^T) / t
  Mat ci;  // batch-means half-widths
};

struct MonteCarloEstimate {
  EffectiveDiffusivity A;  // averaged over observation times
  std::vector<TimeCovariance> per_time;
  /// Entrywise standard deviation of per-medium estimates (zero for one medium).
  Mat dispersion;
  double max_dispersion = 0.0;
  std::size_t paths = 0;
  std::size_t failed = 0;
};

/// Batch-means half-width of the mean of `values` (Student t, B - 1 dof),
/// floored at 1e-15 max(1, |estimate|).
double batch_half_width(const std::vector<double>& values, std::size_t batches);

MonteCarloEstimate mc_diffusivity(const Ensemble& ensemble, std::size_t batches = 20);
MonteCarloEstimate mc_diffusivity(const MediumFamily& family, const EnsembleSpec& spec, int workers = 1);

struct Flag {
  std::string name;
  bool passed = true;
  double value = 0.0;
  double threshold = 0.0;
};

struct DiagnosticsReport {
  double s = 0.0, t = 0.0;
  std::vector<double> excess_kurtosis;  // per component, at t
  Mat cross_covariance;                 // mean(Z_s Z_t^T)
  Mat cross_covariance_ci;
  Mat expected_cross;                   // s A
  Mat increment_correlation;            // corr(Z_s,i, (Z_t - Z_s)_j)
  double increment_threshold = 0.0;     // 4 / sqrt(N)
  std::vector<Flag> flags;
  bool passed = true;
};

inline constexpr double kKurtosisThreshold = 0.2;

/// Brownian-limit checks between observation indices ks < kt. `A` defaults
/// to the ensemble's own estimate at time t.
DiagnosticsReport gaussianity_diagnostics(const Ensemble& ensemble, std::size_t ks, std::size_t kt,
                                          const std::optional<Mat>& A = std::nullopt, std::size_t batches = 20);

struct ErgodicSpec {
  std::size_t n_paths = 100;
  std::vector<double> t_grid;
  double dt = 1e-3;
  std::uint64_t master_seed = 0;
  std::size_t batches = 20;
  int quadrature = 256;

  void validate() const;
};

struct ErgodicCurve {
  std::string observable;
  double pi_f = 0.0;
  std::vector<double> t;
  std::vector<double> error;  // E |t^-1 int_0^t f(Y_r) dr - pi(f)|
  std::vector<double> ci;
  std::optional<double> slope;  // log-log least squares
  bool decreasing = true;
  std::size_t paths = 0;
};

/// pi(f) by quadrature over the period cell, or over the central quarter of
/// the sampled box for a non-periodic chessboard.
double reference_mean(const MediumInstance& medium, const Observable& f, int resolution);

ErgodicCurve ergodic_average(const MediumInstance& medium, const Observable& f, const ErgodicSpec& spec,
                             int workers = 1);

/// Least-squares slope of log y against log x over entries with y > 0.
std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace homlab
