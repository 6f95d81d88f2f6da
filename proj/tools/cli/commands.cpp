#include "commands.hpp"

#include "config.hpp"

#include "homlab/control.hpp"
#include "homlab/errors.hpp"
#include "homlab/json_io.hpp"
#include "homlab/media.hpp"
#include "homlab/observable.hpp"
#include "homlab/sde.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>

namespace fs = std::filesystem;

namespace homlab::cli {

namespace {

struct Context {
  RunConfig config;
  fs::path out;
};

Context load(const CliOptions& o) {
  if (o.config.empty()) throw ConfigError("--config is required");
  Context ctx{load_config(o.config), {}};
  if (o.seed) {
    ctx.config.seed = *o.seed;
    if (ctx.config.ergodic) ctx.config.ergodic->spec.master_seed = *o.seed;
  }
  ctx.out = o.out.empty() ? fs::path(ctx.config.output.directory) : fs::path(o.out);
  fs::create_directories(ctx.out);
  return ctx;
}

Json header(const std::string& command, const RunConfig& c) {
  return Json{{"schema_version", kSchemaVersion}, {"command", command}, {"seed", c.seed}, {"config", resolved(c)}};
}

void write(const fs::path& dir, const std::string& name, const Json& j, std::ostream& log) {
  write_json_file((dir / name).string(), j);
  log << "wrote " << (dir / name).string() << '\n';
}

template <class Fn>
void write_csv(const fs::path& dir, const std::string& name, std::ostream& log, Fn&& fn) {
  std::ofstream os(dir / name);
  if (!os) throw ConfigError("cannot write " + (dir / name).string());
  fn(os);
  log << "wrote " << (dir / name).string() << '\n';
}

void print_matrix(std::ostream& log, const std::string& label, const Mat& A) {
  log << label << " =\n";
  char buf[64];
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    log << "  ";
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%14.8g", A(i, j));
      log << buf;
    }
    log << '\n';
  }
}

Json stripe_summary(const StripeRandomness& s, double p) {
  const auto n = s.colors.size();
  const auto ones = static_cast<std::size_t>(std::count(s.colors.begin(), s.colors.end(), 1));
  const double mean = n ? static_cast<double>(ones) / static_cast<double>(n) : 0.0;
  const double half = n ? 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n)) : 0.0;
  return Json{{"cells", n},
              {"ones", ones},
              {"color_mean", mean},
              {"binomial_interval", {p - half, p + half}},
              {"within_interval", std::abs(mean - p) <= half},
              {"first_cell", s.first_cell},
              {"shift", s.shift}};
}

}  // namespace

int cmd_medium_sample(const CliOptions& o, std::ostream& log) {
  auto ctx = load(o);
  const auto& c = ctx.config;
  if (c.medium.kind != "chessboard") throw ConfigError("medium-sample needs a chessboard medium");
  const auto r = chessboard_randomness(c, 0);

  Json medium = to_json(r);
  medium["schema_version"] = kSchemaVersion;
  medium["config"] = resolved(c);
  write(ctx.out, "medium.json", medium, log);

  const auto instance = make_chessboard_medium(r);
  const auto report = validate_control(instance, instance.field().control_constants(),
                                       SampleGrid::for_medium(instance, 12));
  Json summary = header("medium-sample", c);
  const char* names[] = {"beta", "alpha1", "alpha2"};
  Json stripes = Json::object();
  for (int k = 0; k < 3; ++k) stripes[names[k]] = stripe_summary(r.stripes[k], r.p);
  summary["stripes"] = stripes;
  summary["bound"] = instance.field().bound();
  summary["control"] = to_json(report);
  write(ctx.out, "medium_summary.json", summary, log);
  for (int k = 0; k < 3; ++k)
    log << names[k] << ": color mean " << stripes[names[k]]["color_mean"].get<double>() << " over "
        << r.stripes[k].colors.size() << " cells\n";
  return kOk;
}

int cmd_solve_corrector(const CliOptions& o, std::ostream& log) {
  auto ctx = load(o);
  const auto& c = ctx.config;
  if (!c.corrector) throw ConfigError("solve-corrector needs a 'corrector' section");
  const auto medium = build_medium(c, 0);
  const auto study = run_corrector(medium, *c.corrector, o.workers);
  for (const auto& w : study.warnings) log << "warning: " << w << '\n';

  Json full = header("solve-corrector", c);
  full["study"] = to_json(study);
  write(ctx.out, "corrector.json", full, log);

  Json a = header("solve-corrector", c);
  a.update(to_json(study.A));
  write(ctx.out, "A_corrector.json", a, log);

  if (c.write_fields && c.output.csv()) {
    for (const auto& coord : study.coordinates) {
      if (coord.solutions.empty()) continue;
      const auto name = "u_" + std::to_string(coord.coordinate + 1) + ".csv";
      write_csv(ctx.out, name, log, [&](std::ostream& os) { write_grid_csv(os, coord.solutions.back().u); });
    }
  }
  print_matrix(log, "A (corrector)", study.A.A);
  print_matrix(log, "extrapolation error", study.A.ci);
  return kOk;
}

int cmd_estimate(const CliOptions& o, std::ostream& log) {
  auto ctx = load(o);
  const auto& c = ctx.config;
  if (!c.sde) throw ConfigError("estimate needs an 'sde' section");
  const auto& s = *c.sde;
  std::optional<Mat> reference;
  if (!o.reference.empty()) reference = effective_from_json(read_json_file(o.reference)).A;

  const auto family = build_family(c);
  const auto medium0 = family(0, medium_seed(c.seed, 0));
  const double bound = medium0.field().bound();

  Json results = Json::array();
  std::vector<std::string> warnings;
  std::vector<double> dispersion(s.epsilons.size());
  std::size_t finest = 0;
  MonteCarloEstimate finest_estimate;
  for (std::size_t e = 0; e < s.epsilons.size(); ++e) {
    EnsembleSpec spec;
    spec.n_paths = s.n_paths;
    spec.n_media = s.n_media;
    spec.epsilon = s.epsilons[e];
    spec.T = s.T;
    spec.observation_times = s.observation_times;
    spec.master_seed = c.seed;
    spec.dt = s.dt;
    spec.random_start = s.random_start;
    spec.batches = s.batches;
    spec.validate();

    SdeConfig sde{s.dt, s.T / (spec.epsilon * spec.epsilon), spec.epsilon};
    if (auto w = stability_warning(sde, bound)) {
      warnings.push_back(*w);
      log << "warning: " << *w << '\n';
    }

    const auto ensemble = simulate_ensemble(family, spec, o.workers);
    const auto estimate = mc_diffusivity(ensemble, s.batches);
    Json entry{{"epsilon", spec.epsilon}, {"estimate", to_json(estimate)}};
    if (ensemble.times.size() >= 2) {
      const auto diag = gaussianity_diagnostics(ensemble, 0, ensemble.times.size() - 1, reference, s.batches);
      entry["diagnostics"] = to_json(diag);
    }
    results.push_back(entry);
    dispersion[e] = estimate.max_dispersion;
    if (e == 0 || spec.epsilon < s.epsilons[finest]) {
      finest = e;
      finest_estimate = estimate;
    }
    log << "epsilon " << spec.epsilon << ": " << estimate.paths << " paths, " << estimate.failed << " failed\n";
    print_matrix(log, "A (Monte Carlo)", estimate.A.A);
  }

  Json out = header("estimate", c);
  out["warnings"] = warnings;
  out["results"] = results;
  if (s.epsilons.size() >= 2 && s.n_media >= 2) {
    std::vector<std::size_t> order(s.epsilons.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return s.epsilons[a] > s.epsilons[b]; });
    bool decreasing = true;
    for (std::size_t k = 1; k < order.size(); ++k) decreasing = decreasing && dispersion[order[k]] <= dispersion[order[k - 1]];
    out["dispersion_decreasing"] = decreasing;
  } else {
    out["dispersion_decreasing"] = nullptr;
  }
  write(ctx.out, "estimate.json", out, log);

  Json a = header("estimate", c);
  a["epsilon"] = s.epsilons[finest];
  a.update(to_json(finest_estimate.A));
  write(ctx.out, "A_mc.json", a, log);

  if (c.output.csv()) {
    write_csv(ctx.out, "moments.csv", log, [&](std::ostream& os) { write_moments_csv(os, finest_estimate); });

    const double eps = s.epsilons[finest];
    SdeConfig cfg{s.dt, s.T / (eps * eps), eps};
    cfg.seed = derive_seed(c.seed, 0x7472616a);
    cfg.record_every = std::max<std::size_t>(1, cfg.steps() / 500);
    std::vector<Trajectory> trajs;
    for (std::uint64_t p = 0; p < std::min<std::size_t>(4, s.n_paths); ++p) {
      cfg.path_index = p;
      const auto m = s.random_start ? pi_distributed_shift(medium0, cfg.seed, p) : medium0;
      trajs.push_back(rescale(simulate(m, cfg, Vec::Zero(m.dim())), eps, s.T));
    }
    write_csv(ctx.out, "trajectories.csv", log, [&](std::ostream& os) { write_trajectories_csv(os, trajs); });
  }
  return kOk;
}

int cmd_ergodic(const CliOptions& o, std::ostream& log) {
  auto ctx = load(o);
  const auto& c = ctx.config;
  if (!c.ergodic) throw ConfigError("ergodic needs an 'ergodic' section");
  const auto medium = build_medium(c, 0);
  const auto f = make_observable(c.ergodic->observable, medium.dim());
  const auto curve = ergodic_average(medium, f, c.ergodic->spec, o.workers);

  Json out = header("ergodic", c);
  out.update(to_json(curve));
  write(ctx.out, "ergodic.json", out, log);
  if (c.output.csv()) write_csv(ctx.out, "ergodic.csv", log, [&](std::ostream& os) { write_ergodic_csv(os, curve); });
  log << "pi(" << curve.observable << ") = " << curve.pi_f << '\n';
  if (curve.slope) log << "log-log slope " << *curve.slope << '\n';
  return kOk;
}

int cmd_compare(const CliOptions& o, std::ostream& log) {
  if (o.inputs.size() != 2) throw ConfigError("compare needs two A files: reference (corrector) and candidate (Monte Carlo)");
  double tol = 0.1;
  fs::path out = o.out.empty() ? fs::path(".") : fs::path(o.out);
  Json cfg_json = nullptr;
  if (!o.config.empty()) {
    auto ctx = load(o);
    tol = ctx.config.compare_tol;
    out = ctx.out;
    cfg_json = resolved(ctx.config);
  }
  if (o.tol) tol = *o.tol;
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
  fs::create_directories(out);

  const auto ref = effective_from_json(read_json_file(o.inputs[0]));
  const auto cand = effective_from_json(read_json_file(o.inputs[1]));
  if (ref.A.rows() != cand.A.rows()) throw ConfigError("A files have different dimensions");
  const double err = relative_frobenius_error(cand.A, ref.A);
  const bool pass = err <= tol;

  Json j{{"schema_version", kSchemaVersion},
         {"command", "compare"},
         {"reference", o.inputs[0]},
         {"candidate", o.inputs[1]},
         {"A_reference", matrix_to_json(ref.A)},
         {"A_candidate", matrix_to_json(cand.A)},
         {"relative_frobenius_error", err},
         {"tolerance", tol},
         {"passed", pass}};
  if (!cfg_json.is_null()) j["config"] = cfg_json;
  write(out, "comparison.json", j, log);
  log << "relative Frobenius error " << err << " (tolerance " << tol << "): " << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kOk : kCompareFail;
}

int cmd_report(const CliOptions& o, std::ostream& log) {
  fs::path dir;
  Json cfg_json = nullptr;
  if (!o.config.empty()) {
    auto ctx = load(o);
    dir = ctx.out;
    cfg_json = resolved(ctx.config);
  } else if (!o.out.empty()) {
    dir = o.out;
  } else {
    throw ConfigError("report needs --config or --out");
  }

  Json r{{"schema_version", kSchemaVersion}, {"command", "report"}};
  if (!cfg_json.is_null()) r["config"] = cfg_json;
  Json checks = Json::array();
  auto check = [&](const std::string& name, bool passed) {
    checks.push_back({{"name", name}, {"passed", passed}});
  };
  auto load_if = [&](const char* name) -> std::optional<Json> {
    const auto p = dir / name;
    if (!fs::exists(p)) return std::nullopt;
    return read_json_file(p.string());
  };

  if (auto j = load_if("medium_summary.json")) {
    r["medium"] = {{"stripes", (*j)["stripes"]}, {"control_passed", (*j)["control"]["passed"]}};
    check("control inequalities", (*j)["control"]["passed"].get<bool>());
  }
  if (auto j = load_if("corrector.json")) {
    const auto& s = (*j)["study"];
    r["corrector"] = {{"effective_diffusivity", s["effective_diffusivity"]}, {"checks", s["checks"]},
                      {"warnings", s["warnings"]}};
    for (const auto& [k, v] : s["checks"].items()) check("corrector " + k, v.get<bool>());
  }
  if (auto j = load_if("estimate.json")) {
    Json per = Json::array();
    for (const auto& e : (*j)["results"]) {
      Json item{{"epsilon", e["epsilon"]}, {"effective_diffusivity", e["estimate"]["effective_diffusivity"]},
                {"max_dispersion", e["estimate"]["max_dispersion"]}};
      if (e.contains("diagnostics")) {
        item["gaussianity_passed"] = e["diagnostics"]["passed"];
        check("gaussianity at epsilon " + dump_json(e["epsilon"], -1), e["diagnostics"]["passed"].get<bool>());
      }
      per.push_back(item);
    }
    r["estimate"] = {{"results", per}, {"dispersion_decreasing", (*j)["dispersion_decreasing"]}};
    if ((*j)["dispersion_decreasing"].is_boolean()) check("dispersion decreasing", (*j)["dispersion_decreasing"].get<bool>());
  }
  if (auto j = load_if("ergodic.json")) {
    r["ergodic"] = {{"observable", (*j)["observable"]}, {"pi_f", (*j)["pi_f"]}, {"slope", (*j)["slope"]},
                    {"decreasing", (*j)["decreasing"]}};
    check("ergodic error decreasing", (*j)["decreasing"].get<bool>());
  }
  if (auto j = load_if("comparison.json")) {
    r["comparison"] = {{"relative_frobenius_error", (*j)["relative_frobenius_error"]},
                       {"tolerance", (*j)["tolerance"]}, {"passed", (*j)["passed"]}};
    check("corrector vs Monte Carlo", (*j)["passed"].get<bool>());
  }
  r["checks"] = checks;
  write(dir, "report.json", r, log);
  for (const auto& ch : checks)
    log << (ch["passed"].get<bool>() ? "PASS " : "FAIL ") << ch["name"].get<std::string>() << '\n';
  return kOk;
}

int run_command(const std::string& name, const CliOptions& o, std::ostream& log, std::ostream& err) {
  try {
    if (o.workers < 1) throw ConfigError("--workers must be at least 1");
    if (name == "medium-sample") return cmd_medium_sample(o, log);
    if (name == "solve-corrector") return cmd_solve_corrector(o, log);
    if (name == "estimate") return cmd_estimate(o, log);
    if (name == "ergodic") return cmd_ergodic(o, log);
    if (name == "compare") return cmd_compare(o, log);
    if (name == "report") return cmd_report(o, log);
    throw ConfigError("unknown subcommand '" + name + "'");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const ExtentError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const fs::filesystem_error& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace homlab::cli
