#include "homlab/sde.hpp"

#include "homlab/drift.hpp"
#include "homlab/errors.hpp"
#include "homlab/media.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace homlab {

std::size_t SdeConfig::steps() const {
  validate();
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

void SdeConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("sde.dt must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("sde horizon must be positive");
  if (dt > horizon) throw ConfigError("sde.dt must not exceed the horizon");
  if (!(epsilon > 0.0)) throw ConfigError("sde epsilon must be positive");
  if (scheme != "euler_maruyama") throw ConfigError("unknown scheme '" + scheme + "' (only euler_maruyama)");
  if (record_every == 0) throw ConfigError("record_every must be positive");
  const double n = horizon / dt;
  if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n))
    throw ConfigError("sde horizon must be an integer multiple of dt");
}

double default_dt(double bound) { return 1e-3 * std::min(1.0, 1.0 / (bound * bound)); }

std::optional<std::string> stability_warning(const SdeConfig& config, double bound) {
  const double g = config.dt * bound * bound;
  if (g <= 0.1) return std::nullopt;
  std::ostringstream os;
  os << "dt * K^2 = " << g << " exceeds 0.1 (K = " << bound << ", dt = " << config.dt << ")";
  return os.str();
}

PathStepper::PathStepper(const MediumInstance& medium, const SdeConfig& config, const Vec& start, Dynamics dynamics,
                         double delta)
    : medium_(&medium),
      dynamics_(dynamics),
      dt_(config.dt),
      sqrt_dt_(std::sqrt(config.dt)),
      delta_(delta),
      stream_(config.seed, config.path_index),
      x_(start) {
  if (start.size() != medium.dim()) throw ConfigError("start point dimension does not match the medium");
  xi_.resize(medium.dim());
  bias_ = medium.field().drift_bias();
}

const PointEval& PathStepper::current() const {
  if (!fresh_) {
    medium_->evaluate(s_, x_, p_);
    fresh_ = true;
  }
  return p_;
}

double PathStepper::observe(const Observable& f) const {
  const PointEval& p = current();
  return f(p, s_ + medium_->origin_time(), x_ + medium_->origin_space());
}

void PathStepper::step() {
  try {
    stream_.normals(n_, StreamTag::kSpatialNoise, {xi_.data(), static_cast<std::size_t>(xi_.size())});
    if (dynamics_ == Dynamics::kFull) {
      const PointEval& p = current();
      x_ += (drift(p) + bias_) * dt_ + sqrt_dt_ * (p.sigma * xi_);
    } else {
      medium_->evaluate_control(x_, c_);
      x_ += control_drift(c_, current().grad_V) * dt_ + sqrt_dt_ * (c_.sigma_tilde * xi_);
    }
  } catch (const std::exception& e) {
    std::ostringstream os;
    os << "path " << stream_.path_index() << " failed at step " << n_ << " (t = " << s_ << "): " << e.what();
    if (dynamic_cast<const ExtentError*>(&e)) throw ExtentError(os.str());
    throw NumericalError(os.str());
  }
  ++n_;
  if (delta_ > 0.0) {
    double z;
    stream_.normals(n_ - 1, StreamTag::kTimeNoise, {&z, 1});
    w_time_ += sqrt_dt_ * z;
    s_ = static_cast<double>(n_) * dt_ + std::sqrt(delta_) * w_time_;
  } else {
    s_ = static_cast<double>(n_) * dt_;
  }
  fresh_ = false;
  if (!x_.allFinite()) {
    std::ostringstream os;
    os << "path " << stream_.path_index() << " became non-finite at step " << n_;
    throw NumericalError(os.str());
  }
}

namespace {

Trajectory run(const MediumInstance& medium, const SdeConfig& config, const Vec& start, Dynamics dynamics,
               double delta) {
  const std::size_t n = config.steps();
  PathStepper stepper(medium, config, start, dynamics, delta);
  Trajectory traj;
  traj.medium_id = medium.id();
  traj.seed = config.seed;
  traj.path_index = config.path_index;
  const std::size_t count = n / config.record_every + 1;
  traj.times.reserve(count);
  traj.states.reserve(count);
  const int d = medium.dim();
  auto record = [&] {
    traj.times.push_back(stepper.clock());
    if (delta < 0.0) {
      traj.states.push_back(stepper.state());
    } else {
      Vec z(d + 1);
      z(0) = stepper.time_coordinate();
      z.tail(d) = stepper.state();
      traj.states.push_back(z);
    }
  };
  record();
  for (std::size_t k = 1; k <= n; ++k) {
    stepper.step();
    if (k % config.record_every == 0 || k == n) record();
  }
  return traj;
}

}  // namespace

Trajectory simulate(const MediumInstance& medium, const SdeConfig& config, const Vec& start) {
  return run(medium, config, start, Dynamics::kFull, -1.0);
}

Trajectory simulate_control(const MediumInstance& medium, const SdeConfig& config, const Vec& start) {
  return run(medium, config, start, Dynamics::kControl, -1.0);
}

Trajectory simulate_delta(const MediumInstance& medium, const SdeConfig& config, double delta, const Vec& start) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ConfigError("delta must be finite and nonnegative");
  return run(medium, config, start, Dynamics::kFull, delta);
}

Trajectory rescale(const Trajectory& traj, double epsilon, double T) {
  if (!(epsilon > 0.0)) throw ConfigError("rescale needs epsilon > 0");
  if (!(T > 0.0)) throw ConfigError("rescale needs T > 0");
  const double micro = T / (epsilon * epsilon);
  if (traj.horizon() < micro * (1.0 - 1e-12))
    throw ExtentError("trajectory horizon " + std::to_string(traj.horizon()) + " is shorter than T/epsilon^2 = " +
                      std::to_string(micro));
  Trajectory out;
  out.medium_id = traj.medium_id;
  out.seed = traj.seed;
  out.path_index = traj.path_index;
  for (std::size_t k = 0; k < traj.times.size() && traj.times[k] <= micro * (1.0 + 1e-12); ++k) {
    out.times.push_back(traj.times[k] * epsilon * epsilon);
    out.states.push_back(epsilon * traj.states[k]);
  }
  return out;
}

std::vector<double> observe_environment(const MediumInstance& medium, const Trajectory& traj, const Observable& f) {
  std::vector<double> out;
  out.reserve(traj.times.size());
  for (std::size_t k = 0; k < traj.times.size(); ++k) out.push_back(homlab::observe(medium, f, traj.times[k], traj.states[k]));
  return out;
}

MediumInstance pi_distributed_shift(const MediumInstance& medium, std::uint64_t seed, std::uint64_t path_index) {
  const int d = medium.dim();
  const CounterStream stream(derive_seed(seed, static_cast<std::uint64_t>(StreamTag::kInitialShift)), path_index);
  std::vector<double> u(d + 2);
  Vec y(d);
  const auto geo = medium.field().geometry();

  if (geo.periodic()) {
    const auto& per = *geo.periods;
    // Rejection sampling against exp(-2 V_min), V_min taken on a grid with slack.
    double vmin = std::numeric_limits<double>::infinity();
    constexpr int n = 32;
    std::vector<int> idx(d, 0);
    while (true) {
      for (int i = 0; i < d; ++i) y(i) = per[i + 1] * idx[i] / n;
      vmin = std::min(vmin, medium.field().potential(y));
      int k = 0;
      while (k < d && ++idx[k] == n) idx[k++] = 0;
      if (k == d) break;
    }
    const double vmax = -2.0 * (vmin - 0.05 * std::max(1.0, std::abs(vmin)));
    for (std::uint64_t attempt = 0; attempt < 100000; ++attempt) {
      stream.uniforms(attempt, StreamTag::kInitialShift, u);
      for (int i = 0; i < d; ++i) y(i) = per[i + 1] * u[i + 1];
      const double accept = std::exp(-2.0 * medium.field().potential(y) - vmax);
      if (u[d + 1] <= accept) return medium.shifted(per[0] * u[0], y);
    }
    throw NumericalError("initial distribution sampling did not accept within 1e5 attempts");
  }

  const auto* cb = as_chessboard(medium);
  if (!cb) throw ConfigError("pi-distributed start needs a periodic or chessboard medium");
  stream.uniforms(0, StreamTag::kInitialShift, u);
  const auto e = cb->randomness().extent();
  const double s = -0.125 * static_cast<double>(e[0]) + 0.25 * static_cast<double>(e[0]) * u[0];
  for (int i = 0; i < d; ++i) y(i) = 0.25 * static_cast<double>(e[i + 1]) * (u[i + 1] - 0.5);
  return medium.shifted(s, y);
}

}  // namespace homlab
