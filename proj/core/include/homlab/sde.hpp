#pragma once

#include "homlab/coefficient_field.hpp"
#include "homlab/observable.hpp"
#include "homlab/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace homlab {

struct SdeConfig {
  double dt = 1e-3;
  double horizon = 1.0;
  double epsilon = 1.0;
  std::string scheme = "euler_maruyama";
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  /// Store every k-th state in a Trajectory; the stepper itself is unaffected.
  std::size_t record_every = 1;

  /// Number of steps; horizon must be an integer multiple of dt.
  std::size_t steps() const;
  void validate() const;
};

/// 1e-3 * min(1, 1/K^2).
double default_dt(double bound);

/// Set when dt * K^2 > 0.1.
std::optional<std::string> stability_warning(const SdeConfig& config, double bound);

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  std::string medium_id;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;

  int dim() const { return states.empty() ? 0 : static_cast<int>(states.front().size()); }
  double horizon() const { return times.empty() ? 0.0 : times.back(); }
};

enum class Dynamics { kFull, kControl };

/// Euler-Maruyama stepper for one path. Gaussian increments for step n come
/// from CounterStream(seed, path_index) at counter n, so a path depends only
/// on (medium, config, start).
class PathStepper {
 public:
  /// `delta` < 0 keeps the time coordinate deterministic; delta >= 0 adds
  /// sqrt(delta) times an independent Brownian motion to it.
  PathStepper(const MediumInstance& medium, const SdeConfig& config, const Vec& start,
              Dynamics dynamics = Dynamics::kFull, double delta = -1.0);

  void step();

  std::size_t index() const noexcept { return n_; }
  /// n dt.
  double clock() const noexcept { return static_cast<double>(n_) * dt_; }
  /// Time coordinate of the space-time process (equals clock() unless delta > 0).
  double time_coordinate() const noexcept { return s_; }
  const Vec& state() const noexcept { return x_; }

  /// Coefficients at the current point, in medium coordinates.
  const PointEval& current() const;

  /// f(Y_n) with Y_n the environment seen from the current point.
  double observe(const Observable& f) const;

 private:
  const MediumInstance* medium_;
  Dynamics dynamics_;
  double dt_, sqrt_dt_, delta_;
  CounterStream stream_;
  std::size_t n_ = 0;
  double s_ = 0.0;
  double w_time_ = 0.0;
  Vec x_;
  Vec xi_;
  Vec bias_;
  mutable PointEval p_;
  mutable ControlEval c_;
  mutable bool fresh_ = false;
};

Trajectory simulate(const MediumInstance& medium, const SdeConfig& config, const Vec& start);
Trajectory simulate_control(const MediumInstance& medium, const SdeConfig& config, const Vec& start);

/// (d+1)-dimensional path; coordinate 0 is the time coordinate.
Trajectory simulate_delta(const MediumInstance& medium, const SdeConfig& config, double delta, const Vec& start);

/// t -> epsilon X_{t/epsilon^2} for t in [0, T]. Throws ExtentError when the
/// trajectory is shorter than T/epsilon^2.
Trajectory rescale(const Trajectory& traj, double epsilon, double T);

/// f(Y_{t_n}) along the trajectory.
std::vector<double> observe_environment(const MediumInstance& medium, const Trajectory& traj, const Observable& f);

/// The medium shifted by an initial origin distributed according to pi:
/// uniform time and rejection-sampled space over one period cell for periodic
/// media (the box for periodized chessboards), uniform over the central
/// quarter of the sampled box for non-periodic chessboards.
MediumInstance pi_distributed_shift(const MediumInstance& medium, std::uint64_t seed, std::uint64_t path_index);

}  // namespace homlab
