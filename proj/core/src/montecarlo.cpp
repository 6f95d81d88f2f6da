#include "homlab/montecarlo.hpp"

#include "homlab/control.hpp"
#include "homlab/errors.hpp"
#include "homlab/media.hpp"
#include "homlab/parallel.hpp"
#include "homlab/rng.hpp"
#include "homlab/sde.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace homlab {

namespace {

constexpr std::uint64_t kLabelNoise = 0x6e6f697365;   // "noise"
constexpr std::uint64_t kLabelStart = 0x7374617274;   // "start"
constexpr std::uint64_t kLabelMedium = 0x6d656469756d;  // "medium"

bool is_step_multiple(double t, double dt, std::size_t& steps) {
  const double n = t / dt;
  steps = static_cast<std::size_t>(std::llround(n));
  return std::abs(n - std::round(n)) <= 1e-9 * std::max(1.0, n);
}

double student_quantile(std::size_t dof) {
  const boost::math::students_t dist(static_cast<double>(dof));
  return boost::math::quantile(dist, 0.975);
}

}  // namespace

std::vector<std::size_t> EnsembleSpec::observation_steps() const {
  std::vector<std::size_t> out;
  for (double t : observation_times) {
    std::size_t n = 0;
    if (!is_step_multiple(t / (epsilon * epsilon), dt, n))
      throw ConfigError("observation time " + std::to_string(t) + " / epsilon^2 is not a multiple of dt");
    out.push_back(n);
  }
  return out;
}

void EnsembleSpec::validate() const {
  if (n_paths == 0 || n_media == 0) throw ConfigError("ensemble needs n_paths >= 1 and n_media >= 1");
  if (n_paths * n_media < 100) throw ConfigError("statistical output needs n_paths * n_media >= 100");
  if (!(epsilon > 0.0)) throw ConfigError("ensemble epsilon must be positive");
  if (!(T > 0.0)) throw ConfigError("ensemble T must be positive");
  if (!(dt > 0.0)) throw ConfigError("ensemble dt must be positive");
  if (observation_times.empty()) throw ConfigError("ensemble needs at least one observation time");
  double prev = 0.0;
  for (double t : observation_times) {
    if (!(t > prev) || t > T * (1.0 + 1e-12))
      throw ConfigError("observation times must be increasing within (0, T]");
    prev = t;
  }
  if (batches < 2) throw ConfigError("batch means need at least 2 batches");
  if (n_paths * n_media < batches) throw ConfigError("fewer paths than batches");
  (void)observation_steps();
  std::size_t total = 0;
  if (!is_step_multiple(T / (epsilon * epsilon), dt, total)) throw ConfigError("T / epsilon^2 is not a multiple of dt");
}

std::uint64_t medium_seed(std::uint64_t master_seed, std::size_t index) {
  return derive_seed(master_seed, kLabelMedium, index);
}

MediumFamily fixed_medium(const MediumInstance& medium) {
  return [medium](std::size_t, std::uint64_t) { return medium; };
}

Ensemble simulate_ensemble(const MediumFamily& family, const EnsembleSpec& spec, int workers) {
  spec.validate();
  const auto steps = spec.observation_steps();
  const std::size_t total_paths = spec.n_paths * spec.n_media;

  std::vector<MediumInstance> media;
  media.reserve(spec.n_media);
  for (std::size_t m = 0; m < spec.n_media; ++m) media.push_back(family(m, medium_seed(spec.master_seed, m)));
  const int d = media.front().dim();
  for (const auto& m : media)
    if (m.dim() != d) throw ConfigError("media of one family must share the dimension");

  const std::size_t nt = steps.size();
  std::vector<double> Z(total_paths * nt * d, 0.0);
  std::vector<std::string> errors(total_paths);
  const std::uint64_t noise_seed = derive_seed(spec.master_seed, kLabelNoise);
  const std::uint64_t start_seed = derive_seed(spec.master_seed, kLabelStart);

  parallel_for(total_paths, static_cast<unsigned>(std::max(1, workers)), [&](std::size_t g) {
    const MediumInstance& base = media[g / spec.n_paths];
    try {
      const MediumInstance medium = spec.random_start ? pi_distributed_shift(base, start_seed, g) : base;
      SdeConfig cfg;
      cfg.dt = spec.dt;
      cfg.horizon = static_cast<double>(steps.back()) * spec.dt;
      cfg.seed = noise_seed;
      cfg.path_index = g;
      PathStepper stepper(medium, cfg, Vec::Zero(d));
      std::size_t k = 0;
      while (k < nt) {
        if (stepper.index() == steps[k]) {
          for (int i = 0; i < d; ++i) Z[(g * nt + k) * d + i] = spec.epsilon * stepper.state()(i);
          ++k;
          continue;
        }
        stepper.step();
      }
    } catch (const NumericalError& e) {
      errors[g] = e.what();
    } catch (const ExtentError& e) {
      errors[g] = e.what();
    }
  });

  Ensemble ens;
  ens.dim = d;
  ens.times = spec.observation_times;
  ens.attempted = total_paths;
  for (std::size_t g = 0; g < total_paths; ++g) {
    if (!errors[g].empty()) {
      ++ens.failed;
      if (ens.failures.size() < 5) ens.failures.push_back(errors[g]);
      continue;
    }
    ens.medium_of_path.push_back(g / spec.n_paths);
    ens.Z.insert(ens.Z.end(), Z.begin() + static_cast<std::ptrdiff_t>(g * nt * d),
                 Z.begin() + static_cast<std::ptrdiff_t>((g + 1) * nt * d));
  }
  if (static_cast<double>(ens.failed) > 1e-3 * static_cast<double>(total_paths))
    throw NumericalError(std::to_string(ens.failed) + " of " + std::to_string(total_paths) +
                         " paths failed (limit 0.1%); first: " + ens.failures.front());
  return ens;
}

double batch_half_width(const std::vector<double>& values, std::size_t batches) {
  const std::size_t n = values.size();
  if (batches < 2 || n < batches) throw ConfigError("batch means need at least 2 batches and one value per batch");
  std::vector<double> means(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t lo = b * n / batches, hi = (b + 1) * n / batches;
    means[b] = std::accumulate(values.begin() + lo, values.begin() + hi, 0.0) / static_cast<double>(hi - lo);
  }
  const double mean = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(batches);
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  var /= static_cast<double>(batches - 1);
  const double est = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  const double hw = student_quantile(batches - 1) * std::sqrt(var / static_cast<double>(batches));
  return std::max(hw, 1e-15 * std::max(1.0, std::abs(est)));
}

MonteCarloEstimate mc_diffusivity(const Ensemble& ens, std::size_t batches) {
  const int d = ens.dim;
  const std::size_t N = ens.paths(), nt = ens.times.size();
  if (N < batches) throw NumericalError("too few successful paths for batch means");

  MonteCarloEstimate out;
  out.paths = N;
  out.failed = ens.failed;
  out.A.method = "monte_carlo";
  out.A.A = Mat::Zero(d, d);
  out.A.ci = Mat::Zero(d, d);

  std::vector<double> vals(N), avg(N);
  for (std::size_t k = 0; k < nt; ++k) {
    TimeCovariance tc{ens.times[k], Mat::Zero(d, d), Mat::Zero(d, d)};
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        for (std::size_t p = 0; p < N; ++p) vals[p] = ens.z(p, k, i) * ens.z(p, k, j) / ens.times[k];
        const double m = std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(N);
        tc.A(i, j) = tc.A(j, i) = m;
        tc.ci(i, j) = tc.ci(j, i) = batch_half_width(vals, batches);
      }
    out.per_time.push_back(tc);
  }
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      for (std::size_t p = 0; p < N; ++p) {
        double s = 0.0;
        for (std::size_t k = 0; k < nt; ++k) s += ens.z(p, k, i) * ens.z(p, k, j) / ens.times[k];
        avg[p] = s / static_cast<double>(nt);
      }
      out.A.A(i, j) = out.A.A(j, i) = std::accumulate(avg.begin(), avg.end(), 0.0) / static_cast<double>(N);
      out.A.ci(i, j) = out.A.ci(j, i) = batch_half_width(avg, batches);
    }

  const std::size_t n_media =
      ens.medium_of_path.empty() ? 0 : *std::max_element(ens.medium_of_path.begin(), ens.medium_of_path.end()) + 1;
  out.dispersion = Mat::Zero(d, d);
  if (n_media > 1) {
    std::vector<Mat> per(n_media, Mat::Zero(d, d));
    std::vector<std::size_t> count(n_media, 0);
    for (std::size_t p = 0; p < N; ++p) {
      const auto m = ens.medium_of_path[p];
      ++count[m];
      for (std::size_t k = 0; k < nt; ++k)
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j)
            per[m](i, j) += ens.z(p, k, i) * ens.z(p, k, j) / (ens.times[k] * static_cast<double>(nt));
    }
    Mat mean = Mat::Zero(d, d);
    std::size_t used = 0;
    for (std::size_t m = 0; m < n_media; ++m)
      if (count[m]) {
        per[m] /= static_cast<double>(count[m]);
        mean += per[m];
        ++used;
      }
    mean /= static_cast<double>(used);
    for (std::size_t m = 0; m < n_media; ++m)
      if (count[m]) out.dispersion += (per[m] - mean).cwiseAbs2();
    if (used > 1) out.dispersion = (out.dispersion / static_cast<double>(used - 1)).cwiseSqrt();
  }
  out.max_dispersion = out.dispersion.maxCoeff();
  return out;
}

MonteCarloEstimate mc_diffusivity(const MediumFamily& family, const EnsembleSpec& spec, int workers) {
  return mc_diffusivity(simulate_ensemble(family, spec, workers), spec.batches);
}

DiagnosticsReport gaussianity_diagnostics(const Ensemble& ens, std::size_t ks, std::size_t kt,
                                          const std::optional<Mat>& A, std::size_t batches) {
  if (!(ks < kt) || kt >= ens.times.size()) throw ConfigError("diagnostics need observation indices s < t");
  const int d = ens.dim;
  const std::size_t N = ens.paths();
  if (N < batches) throw NumericalError("too few successful paths for diagnostics");
  const double s = ens.times[ks], t = ens.times[kt];

  DiagnosticsReport rep;
  rep.s = s;
  rep.t = t;
  for (int i = 0; i < d; ++i) {
    double mean = 0.0;
    for (std::size_t p = 0; p < N; ++p) mean += ens.z(p, kt, i);
    mean /= static_cast<double>(N);
    double m2 = 0.0, m4 = 0.0;
    for (std::size_t p = 0; p < N; ++p) {
      const double c = ens.z(p, kt, i) - mean;
      m2 += c * c;
      m4 += c * c * c * c;
    }
    m2 /= static_cast<double>(N);
    m4 /= static_cast<double>(N);
    const double kappa = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : std::numeric_limits<double>::quiet_NaN();
    rep.excess_kurtosis.push_back(kappa);
    rep.flags.push_back({"kurtosis_x" + std::to_string(i + 1), std::isfinite(kappa) && std::abs(kappa) <= kKurtosisThreshold,
                         kappa, kKurtosisThreshold});
  }

  Mat At = Mat::Zero(d, d);
  std::vector<double> vals(N);
  rep.cross_covariance = Mat::Zero(d, d);
  rep.cross_covariance_ci = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double sum_t = 0.0;
      for (std::size_t p = 0; p < N; ++p) {
        vals[p] = ens.z(p, ks, i) * ens.z(p, kt, j);
        sum_t += ens.z(p, kt, i) * ens.z(p, kt, j);
      }
      At(i, j) = sum_t / (static_cast<double>(N) * t);
      rep.cross_covariance(i, j) = std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(N);
      rep.cross_covariance_ci(i, j) = batch_half_width(vals, batches);
    }
  rep.expected_cross = s * (A ? *A : At);
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      worst = std::max(worst, std::abs(rep.cross_covariance(i, j) - rep.expected_cross(i, j)) /
                                  rep.cross_covariance_ci(i, j));
  rep.flags.push_back({"cross_covariance", worst <= 1.0, worst, 1.0});

  rep.increment_threshold = 4.0 / std::sqrt(static_cast<double>(N));
  rep.increment_correlation = Mat::Zero(d, d);
  double worst_corr = 0.0;
  bool degenerate = false;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double ma = 0.0, mb = 0.0;
      for (std::size_t p = 0; p < N; ++p) {
        ma += ens.z(p, ks, i);
        mb += ens.z(p, kt, j) - ens.z(p, ks, j);
      }
      ma /= static_cast<double>(N);
      mb /= static_cast<double>(N);
      double sab = 0.0, saa = 0.0, sbb = 0.0;
      for (std::size_t p = 0; p < N; ++p) {
        const double a = ens.z(p, ks, i) - ma, b = ens.z(p, kt, j) - ens.z(p, ks, j) - mb;
        sab += a * b;
        saa += a * a;
        sbb += b * b;
      }
      if (saa <= 0.0 || sbb <= 0.0) {
        degenerate = true;
        rep.increment_correlation(i, j) = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      rep.increment_correlation(i, j) = sab / std::sqrt(saa * sbb);
      worst_corr = std::max(worst_corr, std::abs(rep.increment_correlation(i, j)));
    }
  rep.flags.push_back({"increment_correlation", !degenerate && worst_corr <= rep.increment_threshold,
                       degenerate ? std::numeric_limits<double>::quiet_NaN() : worst_corr, rep.increment_threshold});

  rep.passed = std::all_of(rep.flags.begin(), rep.flags.end(), [](const Flag& f) { return f.passed; });
  return rep;
}

void ErgodicSpec::validate() const {
  if (n_paths < 2) throw ConfigError("ergodic average needs at least 2 paths");
  if (t_grid.empty()) throw ConfigError("ergodic average needs a nonempty t_grid");
  if (!(dt > 0.0)) throw ConfigError("ergodic dt must be positive");
  double prev = 0.0;
  for (double t : t_grid) {
    std::size_t n = 0;
    if (!(t > prev) || !is_step_multiple(t, dt, n)) throw ConfigError("t_grid must increase and consist of multiples of dt");
    prev = t;
  }
  if (batches < 2 || batches > n_paths) throw ConfigError("ergodic batches must lie in [2, n_paths]");
  if (quadrature < 2) throw ConfigError("ergodic quadrature needs at least 2 points per axis");
}

double reference_mean(const MediumInstance& medium, const Observable& f, int resolution) {
  if (medium.field().geometry().periodic()) return pi_mean(medium, f, resolution);
  const SampleGrid g = SampleGrid::for_medium(medium, resolution);
  const int d = medium.dim();
  PointEval p;
  Vec x(d);
  std::vector<int> idx(d + 1, 0);
  double sum = 0.0, wsum = 0.0;
  while (true) {
    const double t = g.lo[0] + (g.hi[0] - g.lo[0]) * (idx[0] + 0.5) / resolution;
    for (int i = 0; i < d; ++i) x(i) = g.lo[i + 1] + (g.hi[i + 1] - g.lo[i + 1]) * (idx[i + 1] + 0.5) / resolution;
    medium.evaluate(t, x, p);
    const double w = std::exp(-2.0 * p.V);
    sum += w * f(p, t + medium.origin_time(), x + medium.origin_space());
    wsum += w;
    int k = 0;
    while (k <= d && ++idx[k] == resolution) idx[k++] = 0;
    if (k > d) break;
  }
  return sum / wsum;
}

ErgodicCurve ergodic_average(const MediumInstance& medium, const Observable& f, const ErgodicSpec& spec, int workers) {
  spec.validate();
  ErgodicCurve out;
  out.observable = f.name;
  out.t = spec.t_grid;
  out.paths = spec.n_paths;
  out.pi_f = reference_mean(medium, f, spec.quadrature);

  std::vector<std::size_t> steps;
  for (double t : spec.t_grid) {
    std::size_t n = 0;
    is_step_multiple(t, spec.dt, n);
    steps.push_back(n);
  }
  const std::size_t nt = steps.size();
  std::vector<double> err(spec.n_paths * nt, 0.0);
  const std::uint64_t noise_seed = derive_seed(spec.master_seed, kLabelNoise);
  const std::uint64_t start_seed = derive_seed(spec.master_seed, kLabelStart);

  if (!f.constant) {
    parallel_for(spec.n_paths, static_cast<unsigned>(std::max(1, workers)), [&](std::size_t g) {
      const MediumInstance shifted = pi_distributed_shift(medium, start_seed, g);
      SdeConfig cfg;
      cfg.dt = spec.dt;
      cfg.horizon = static_cast<double>(steps.back()) * spec.dt;
      cfg.seed = noise_seed;
      cfg.path_index = g;
      PathStepper stepper(shifted, cfg, Vec::Zero(medium.dim()));
      double integral = 0.0;
      for (std::size_t k = 0; k < nt; ++k) {
        while (stepper.index() < steps[k]) {
          integral += stepper.observe(f);
          stepper.step();
        }
        err[g * nt + k] = std::abs(integral / static_cast<double>(steps[k]) - out.pi_f);
      }
    });
  }

  std::vector<double> col(spec.n_paths);
  for (std::size_t k = 0; k < nt; ++k) {
    for (std::size_t g = 0; g < spec.n_paths; ++g) col[g] = err[g * nt + k];
    out.error.push_back(std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(spec.n_paths));
    out.ci.push_back(batch_half_width(col, spec.batches));
  }
  for (std::size_t k = 1; k < nt; ++k)
    if (out.error[k] > out.error[k - 1]) out.decreasing = false;
  out.slope = loglog_slope(out.t, out.error);
  return out;
}

std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < std::min(x.size(), y.size()); ++k) {
    if (!(y[k] > 0.0) || !(x[k] > 0.0)) continue;
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::nullopt;
  const double den = static_cast<double>(n) * sxx - sx * sx;
  if (den <= 0.0) return std::nullopt;
  return (static_cast<double>(n) * sxy - sx * sy) / den;
}

}  // namespace homlab
