#include "config.hpp"

#include "homlab/errors.hpp"
#include "homlab/media.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace homlab::cli {

namespace {

void check_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError("'" + where + "' must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
void read(const Json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError("wrong type for '" + where + "." + key + "'");
  }
}

double positive(double v, const std::string& name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(name + " must be positive");
  return v;
}

Mat read_matrix(const Json& obj, const char* key, const std::string& where) {
  try {
    return matrix_from_json(obj.at(key));
  } catch (const Json::exception&) {
    throw ConfigError("missing or malformed matrix '" + where + "." + key + "'");
  }
}

MediumSection parse_medium(const Json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError("medium section needs a 'kind'");
  MediumSection m;
  read(j, "kind", m.kind, "medium");
  if (m.kind == "periodic") {
    check_keys(j, {"kind", "alpha", "u"}, "medium");
    read(j, "alpha", m.alpha, "medium");
    if (j.contains("u")) {
      const auto& u = j["u"];
      check_keys(u, {"kind", "amplitude"}, "medium.u");
      std::string kind = "identity";
      read(u, "kind", kind, "medium.u");
      m.u.kind = USpec::parse_kind(kind);
      read(u, "amplitude", m.u.amplitude, "medium.u");
    }
  } else if (m.kind == "chessboard") {
    check_keys(j, {"kind", "p", "mollifier", "extent", "periodic", "file"}, "medium");
    read(j, "p", m.p, "medium");
    read(j, "periodic", m.periodic, "medium");
    read(j, "file", m.file, "medium");
    if (j.contains("mollifier")) {
      check_keys(j["mollifier"], {"support_radius", "profile"}, "medium.mollifier");
      read(j["mollifier"], "support_radius", m.mollifier.support_radius, "medium.mollifier");
      read(j["mollifier"], "profile", m.mollifier.profile, "medium.mollifier");
    }
    if (j.contains("extent")) {
      std::vector<std::int64_t> e;
      read(j, "extent", e, "medium");
      if (e.size() != 3) throw ConfigError("medium.extent needs three entries (time, x1, x2)");
      std::copy(e.begin(), e.end(), m.extent.begin());
    }
    if (!(m.p >= 0.0 && m.p <= 1.0))
      throw ConfigError("medium.p must lie in [0, 1]");
  } else if (m.kind == "constant") {
    check_keys(j, {"kind", "sigma", "H", "drift"}, "medium");
    m.sigma = read_matrix(j, "sigma", "medium");
    const auto d = m.sigma.rows();
    m.H = j.contains("H") ? read_matrix(j, "H", "medium") : Mat::Zero(d, d);
    m.drift = Vec::Zero(d);
    if (j.contains("drift")) {
      std::vector<double> b;
      read(j, "drift", b, "medium");
      if (static_cast<Eigen::Index>(b.size()) != d) throw ConfigError("medium.drift must have d entries");
      for (Eigen::Index i = 0; i < d; ++i) m.drift(i) = b[static_cast<std::size_t>(i)];
    }
  } else if (m.kind == "periodic1d") {
    check_keys(j, {"kind", "a0", "a1", "v1"}, "medium");
    read(j, "a0", m.a0, "medium");
    read(j, "a1", m.a1, "medium");
    read(j, "v1", m.v1, "medium");
  } else if (m.kind == "elliptic2d") {
    check_keys(j, {"kind", "kappa", "eta"}, "medium");
    read(j, "kappa", m.kappa, "medium");
    read(j, "eta", m.eta, "medium");
  } else {
    throw ConfigError("unknown medium kind '" + m.kind + "' (periodic, chessboard, constant, periodic1d, elliptic2d)");
  }
  return m;
}

SdeSection parse_sde(const Json& j) {
  check_keys(j, {"dt", "epsilon", "epsilons", "T", "observation_times", "n_paths", "n_media", "random_start", "batches"},
             "sde");
  SdeSection s;
  read(j, "dt", s.dt, "sde");
  if (j.contains("epsilon") && j.contains("epsilons")) throw ConfigError("give either sde.epsilon or sde.epsilons");
  if (j.contains("epsilon")) {
    double e = 0.0;
    read(j, "epsilon", e, "sde");
    s.epsilons = {e};
  }
  read(j, "epsilons", s.epsilons, "sde");
  read(j, "T", s.T, "sde");
  read(j, "observation_times", s.observation_times, "sde");
  read(j, "n_paths", s.n_paths, "sde");
  read(j, "n_media", s.n_media, "sde");
  read(j, "random_start", s.random_start, "sde");
  read(j, "batches", s.batches, "sde");
  positive(s.dt, "sde.dt");
  positive(s.T, "sde.T");
  if (s.epsilons.empty()) throw ConfigError("sde.epsilons must not be empty");
  for (double e : s.epsilons) positive(e, "sde.epsilon");
  return s;
}

CorrectorConfig parse_corrector(const Json& j, bool& write_fields) {
  check_keys(j, {"grid", "lambdas", "delta0", "delta_levels", "final_delta", "theta", "rtol", "max_iter", "write_fields"},
             "corrector");
  CorrectorConfig c;
  if (!j.contains("grid")) throw ConfigError("corrector.grid is required");
  read(j, "grid", c.grid, "corrector");
  read(j, "lambdas", c.lambdas, "corrector");
  read(j, "delta0", c.delta0, "corrector");
  read(j, "delta_levels", c.delta_levels, "corrector");
  read(j, "final_delta", c.final_delta, "corrector");
  read(j, "theta", c.theta, "corrector");
  read(j, "rtol", c.solver.rtol, "corrector");
  read(j, "max_iter", c.solver.max_iter, "corrector");
  read(j, "write_fields", write_fields, "corrector");
  return c;
}

ErgodicSection parse_ergodic(const Json& j) {
  check_keys(j, {"observable", "t_grid", "n_paths", "dt", "batches", "quadrature"}, "ergodic");
  ErgodicSection e;
  read(j, "observable", e.observable, "ergodic");
  read(j, "t_grid", e.spec.t_grid, "ergodic");
  read(j, "n_paths", e.spec.n_paths, "ergodic");
  read(j, "dt", e.spec.dt, "ergodic");
  read(j, "batches", e.spec.batches, "ergodic");
  read(j, "quadrature", e.spec.quadrature, "ergodic");
  return e;
}

}  // namespace

bool OutputSection::csv() const { return std::find(formats.begin(), formats.end(), "csv") != formats.end(); }

RunConfig parse_config(const Json& j) {
  check_keys(j, {"seed", "medium", "sde", "corrector", "ergodic", "compare", "output"}, "config");
  RunConfig c;
  read(j, "seed", c.seed, "config");
  if (!j.contains("medium")) throw ConfigError("config needs a 'medium' section");
  c.medium = parse_medium(j["medium"]);
  if (j.contains("sde")) c.sde = parse_sde(j["sde"]);
  if (j.contains("corrector")) c.corrector = parse_corrector(j["corrector"], c.write_fields);
  if (j.contains("ergodic")) c.ergodic = parse_ergodic(j["ergodic"]);
  if (j.contains("compare")) {
    check_keys(j["compare"], {"tol"}, "compare");
    read(j["compare"], "tol", c.compare_tol, "compare");
    positive(c.compare_tol, "compare.tol");
  }
  if (j.contains("output")) {
    check_keys(j["output"], {"directory", "formats"}, "output");
    read(j["output"], "directory", c.output.directory, "output");
    read(j["output"], "formats", c.output.formats, "output");
    for (const auto& f : c.output.formats)
      if (f != "json" && f != "csv") throw ConfigError("output.formats entries must be 'json' or 'csv'");
  }
  if (c.ergodic) c.ergodic->spec.master_seed = c.seed;
  return c;
}

RunConfig load_config(const std::string& path) { return parse_config(read_json_file(path)); }

Json resolved(const RunConfig& c) {
  Json j;
  j["seed"] = c.seed;
  const auto& m = c.medium;
  Json mj{{"kind", m.kind}};
  if (m.kind == "periodic") {
    mj["alpha"] = m.alpha;
    mj["u"] = {{"kind", USpec::kind_name(m.u.kind)}, {"amplitude", m.u.amplitude}};
  } else if (m.kind == "chessboard") {
    mj["p"] = m.p;
    mj["mollifier"] = {{"support_radius", m.mollifier.support_radius}, {"profile", m.mollifier.profile}};
    mj["extent"] = m.extent;
    mj["periodic"] = m.periodic;
    if (!m.file.empty()) mj["file"] = m.file;
  } else if (m.kind == "constant") {
    mj["sigma"] = matrix_to_json(m.sigma);
    mj["H"] = matrix_to_json(m.H);
    mj["drift"] = std::vector<double>(m.drift.data(), m.drift.data() + m.drift.size());
  } else if (m.kind == "periodic1d") {
    mj["a0"] = m.a0;
    mj["a1"] = m.a1;
    mj["v1"] = m.v1;
  } else if (m.kind == "elliptic2d") {
    mj["kappa"] = m.kappa;
    mj["eta"] = m.eta;
  }
  j["medium"] = mj;
  if (c.sde) {
    const auto& s = *c.sde;
    j["sde"] = {{"dt", s.dt},           {"epsilons", s.epsilons}, {"T", s.T},
                {"observation_times", s.observation_times},       {"n_paths", s.n_paths},
                {"n_media", s.n_media}, {"random_start", s.random_start}, {"batches", s.batches}};
  }
  if (c.corrector) {
    const auto& k = *c.corrector;
    j["corrector"] = {{"grid", k.grid},
                      {"lambdas", k.lambdas},
                      {"delta0", k.delta0},
                      {"delta_levels", k.delta_levels},
                      {"final_delta", k.final_delta},
                      {"theta", k.theta},
                      {"rtol", k.solver.rtol},
                      {"max_iter", k.solver.max_iter},
                      {"write_fields", c.write_fields}};
  }
  if (c.ergodic) {
    const auto& e = *c.ergodic;
    j["ergodic"] = {{"observable", e.observable},    {"t_grid", e.spec.t_grid},   {"n_paths", e.spec.n_paths},
                    {"dt", e.spec.dt},               {"batches", e.spec.batches}, {"quadrature", e.spec.quadrature}};
  }
  j["compare"] = {{"tol", c.compare_tol}};
  j["output"] = {{"directory", c.output.directory}, {"formats", c.output.formats}};
  return j;
}

ChessboardRandomness chessboard_randomness(const RunConfig& c, std::size_t index) {
  const auto& m = c.medium;
  if (m.kind != "chessboard") throw ConfigError("medium kind is not chessboard");
  if (!m.file.empty()) return chessboard_from_json(read_json_file(m.file));
  return sample_chessboard(m.p, m.mollifier, medium_seed(c.seed, index), m.extent, m.periodic);
}

MediumInstance build_medium(const RunConfig& c, std::size_t index) {
  const auto& m = c.medium;
  if (m.kind == "periodic") return make_periodic_medium(m.alpha, m.u);
  if (m.kind == "chessboard") return make_chessboard_medium(chessboard_randomness(c, index));
  if (m.kind == "constant") return make_constant_medium(m.sigma, m.H, m.drift);
  if (m.kind == "periodic1d") return make_periodic1d_medium(m.a0, m.a1, m.v1);
  if (m.kind == "elliptic2d") return make_elliptic2d_medium(m.kappa, m.eta);
  throw ConfigError("unknown medium kind '" + m.kind + "'");
}

MediumFamily build_family(const RunConfig& c) {
  if (c.medium.kind == "chessboard" && c.medium.file.empty()) {
    const auto m = c.medium;
    return [m](std::size_t, std::uint64_t seed) {
      return make_chessboard_medium(m.p, m.mollifier, seed, m.extent, m.periodic);
    };
  }
  return fixed_medium(build_medium(c, 0));
}

}  // namespace homlab::cli
