#include "homlab/json_io.hpp"

#include "homlab/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace homlab {

namespace {

void dump_string(std::string& out, const std::string& s) {
  out += Json(s).dump();
}

void dump_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void dump(std::string& out, const Json& j, int indent, int level) {
  const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (level + 1)), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * level), ' ') : "";
  const char* sep = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += pad;
        dump_string(out, it.key());
        out += sep;
        dump(out, it.value(), indent, level + 1);
      }
      out += close + '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat && indent > 0 ? ", " : ",";
        if (!flat) out += pad;
        first = false;
        dump(out, e, indent, level + 1);
      }
      out += flat ? "]" : close + ']';
      return;
    }
    case Json::value_t::number_float:
      dump_number(out, j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump(out, j, indent, 0);
  out += '\n';
  return out;
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write '" + path + "'");
  os << dump_json(j);
}

Json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read '" + path + "'");
  try {
    return Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

Json matrix_to_json(const Mat& A) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < A.cols(); ++j) row.push_back(A(i, j));
    rows.push_back(row);
  }
  return rows;
}

Mat matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || j.size() > kMaxDim) throw ConfigError("matrix must be a nonempty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  Mat A(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) throw ConfigError("matrix must be square");
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!row[static_cast<std::size_t>(k)].is_number()) throw ConfigError("matrix entries must be numbers");
      A(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
  }
  return A;
}

Json to_json(const EffectiveDiffusivity& A) {
  Json j;
  j["method"] = A.method;
  j["A"] = matrix_to_json(A.A);
  j["ci"] = matrix_to_json(A.ci.size() ? A.ci : Mat::Zero(A.A.rows(), A.A.cols()));
  return j;
}

EffectiveDiffusivity effective_from_json(const Json& j) {
  const Json* src = &j;
  if (!j.contains("A") && j.contains("effective_diffusivity")) src = &j["effective_diffusivity"];
  if (!src->contains("A")) throw ConfigError("file has no effective diffusivity 'A'");
  EffectiveDiffusivity e;
  e.A = matrix_from_json((*src)["A"]);
  e.method = src->value("method", std::string("unknown"));
  e.ci = src->contains("ci") ? matrix_from_json((*src)["ci"]) : Mat::Zero(e.A.rows(), e.A.cols());
  return e;
}

Json to_json(const ControlConstants& c) {
  return Json{{"m", c.m}, {"M", c.M}, {"C1_H", c.C1_H}, {"C2_H", c.C2_H}, {"C2_a", c.C2_a}};
}

Json to_json(const ControlReport& r) {
  Json margins = Json::array();
  for (const auto& m : r.margins) margins.push_back({{"inequality", m.name}, {"margin", m.margin}, {"passed", m.passed}});
  return Json{{"passed", r.passed},
              {"points", r.points},
              {"margins", margins},
              {"estimated_constants", to_json(r.estimated)},
              {"max_antisymmetry_defect", r.max_antisymmetry_defect},
              {"min_eigenvalue_a", r.min_eigenvalue_a},
              {"min_eigenvalue_a_tilde", r.min_eigenvalue_a_tilde}};
}

Json to_json(const CorrectorSolution& s, bool include_history) {
  Json j{{"coordinate", s.coordinate + 1},
         {"lambda", s.lambda},
         {"delta", s.delta},
         {"theta", s.theta},
         {"grid_shape", s.u.shape.n},
         {"periods", s.u.shape.periods},
         {"residual_norm", s.residual_norm},
         {"iterations", s.iterations},
         {"method", s.method},
         {"l2", s.l2},
         {"h1_tilde", s.h1},
         {"lambda_u2", s.lambda * s.l2 * s.l2},
         {"rhs_l2", s.rhs_l2},
         {"energy", {{"lhs", s.energy_lhs}, {"rhs", s.energy_rhs}, {"ok", s.energy_ok}}}};
  if (include_history) j["residual_history"] = s.residual_history;
  return j;
}

Json to_json(const CorrectorStudy& s) {
  Json coords = Json::array();
  for (const auto& c : s.coordinates) {
    Json sols = Json::array();
    for (const auto& sol : c.solutions) sols.push_back(to_json(sol));
    coords.push_back({{"coordinate", c.coordinate + 1},
                      {"solutions", sols},
                      {"continuation", {{"deltas", c.continuation_deltas},
                                        {"h1_differences", c.continuation},
                                        {"monotone", c.continuation_monotone}}},
                      {"extrapolation", {{"error_estimate", c.extrapolation.error_estimate},
                                         {"lambda_u2", c.extrapolation.lambda_u2},
                                         {"lambda_u2_decreasing", c.extrapolation.lambda_u2_decreasing},
                                         {"gradient_differences", c.extrapolation.gradient_differences}}},
                      {"drift_h_minus_one", c.drift_h_minus_one},
                      {"drift_bound", c.drift_bound},
                      {"time_variation", c.time_variation}});
  }
  return Json{{"grid_shape", s.shape.n},
              {"periods", s.shape.periods},
              {"control_constants", to_json(s.constants)},
              {"effective_diffusivity", to_json(s.A)},
              {"A_last_lambda", matrix_to_json(s.A_last_lambda.A)},
              {"min_eigenvalue_a", s.min_eigenvalue_a},
              {"checks", {{"energy", s.energy_ok},
                          {"continuation_monotone", s.continuation_ok},
                          {"lambda_u2_decreasing", s.lambda_u2_decreasing}}},
              {"warnings", s.warnings},
              {"coordinates", coords}};
}

Json to_json(const MonteCarloEstimate& e) {
  Json per = Json::array();
  for (const auto& tc : e.per_time) per.push_back({{"t", tc.t}, {"A", matrix_to_json(tc.A)}, {"ci", matrix_to_json(tc.ci)}});
  return Json{{"effective_diffusivity", to_json(e.A)},
              {"per_time", per},
              {"dispersion", matrix_to_json(e.dispersion)},
              {"max_dispersion", e.max_dispersion},
              {"paths", e.paths},
              {"failed", e.failed}};
}

Json to_json(const DiagnosticsReport& r) {
  Json flags = Json::array();
  for (const auto& f : r.flags)
    flags.push_back({{"name", f.name}, {"passed", f.passed}, {"value", f.value}, {"threshold", f.threshold}});
  return Json{{"s", r.s},
              {"t", r.t},
              {"excess_kurtosis", r.excess_kurtosis},
              {"cross_covariance", matrix_to_json(r.cross_covariance)},
              {"cross_covariance_ci", matrix_to_json(r.cross_covariance_ci)},
              {"expected_cross", matrix_to_json(r.expected_cross)},
              {"increment_correlation", matrix_to_json(r.increment_correlation)},
              {"increment_threshold", r.increment_threshold},
              {"flags", flags},
              {"passed", r.passed}};
}

Json to_json(const ErgodicCurve& c) {
  Json j{{"observable", c.observable}, {"pi_f", c.pi_f}, {"t", c.t}, {"error", c.error}, {"ci", c.ci},
         {"decreasing", c.decreasing}, {"paths", c.paths}};
  j["slope"] = c.slope ? Json(*c.slope) : Json(nullptr);
  return j;
}

Json to_json(const ChessboardRandomness& r) {
  Json stripes = Json::array();
  const char* names[] = {"beta", "alpha1", "alpha2"};
  for (int k = 0; k < 3; ++k)
    stripes.push_back({{"process", names[k]},
                       {"first_cell", r.stripes[k].first_cell},
                       {"shift", r.stripes[k].shift},
                       {"colors", r.stripes[k].colors}});
  return Json{{"kind", "chessboard"},
              {"p", r.p},
              {"seed", r.seed},
              {"periodic", r.periodic},
              {"mollifier", {{"support_radius", r.mollifier.support_radius}, {"profile", r.mollifier.profile}}},
              {"stripes", stripes}};
}

ChessboardRandomness chessboard_from_json(const Json& j) {
  try {
    ChessboardRandomness r;
    r.p = j.at("p").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.periodic = j.at("periodic").get<bool>();
    r.mollifier.support_radius = j.at("mollifier").at("support_radius").get<double>();
    r.mollifier.profile = j.at("mollifier").at("profile").get<std::string>();
    const auto& stripes = j.at("stripes");
    if (!stripes.is_array() || stripes.size() != 3) throw ConfigError("chessboard file needs three stripe processes");
    for (int k = 0; k < 3; ++k) {
      const auto& s = stripes[static_cast<std::size_t>(k)];
      r.stripes[k].first_cell = s.at("first_cell").get<std::int64_t>();
      r.stripes[k].shift = s.at("shift").get<double>();
      r.stripes[k].colors = s.at("colors").get<std::vector<int>>();
      for (int c : r.stripes[k].colors)
        if (c != 0 && c != 1) throw ConfigError("chessboard colors must be 0 or 1");
      if (!(r.stripes[k].shift >= 0.0 && r.stripes[k].shift < 1.0)) throw ConfigError("stripe shift must lie in [0, 1)");
    }
    return r;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed chessboard file: ") + e.what());
  }
}

void write_trajectories_csv(std::ostream& os, const std::vector<Trajectory>& trajs) {
  const int d = trajs.empty() ? 0 : trajs.front().dim();
  os << "path,step,t";
  for (int i = 1; i <= d; ++i) os << ",x" << i;
  os << '\n';
  char buf[32];
  for (const auto& tr : trajs)
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      os << tr.path_index << ',' << k;
      std::snprintf(buf, sizeof buf, ",%.17g", tr.times[k]);
      os << buf;
      for (int i = 0; i < d; ++i) {
        std::snprintf(buf, sizeof buf, ",%.17g", tr.states[k](i));
        os << buf;
      }
      os << '\n';
    }
}

void write_grid_csv(std::ostream& os, const GridFunction& f) {
  const int d = f.shape.dim();
  os << "it";
  for (int i = 1; i <= d; ++i) os << ",i" << i;
  os << ",t";
  for (int i = 1; i <= d; ++i) os << ",x" << i;
  os << ",value\n";
  char buf[32];
  for (std::size_t n = 0; n < f.shape.size(); ++n) {
    const auto m = f.shape.multi_index(n);
    for (int a = 0; a <= d; ++a) os << (a ? "," : "") << m[a];
    for (int a = 0; a <= d; ++a) {
      std::snprintf(buf, sizeof buf, ",%.17g", m[a] * f.shape.spacing(a));
      os << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g\n", f.values[static_cast<Eigen::Index>(n)]);
    os << buf;
  }
}

void write_moments_csv(std::ostream& os, const MonteCarloEstimate& e) {
  os << "t,i,j,estimate,ci_half_width\n";
  char buf[96];
  for (const auto& tc : e.per_time)
    for (Eigen::Index i = 0; i < tc.A.rows(); ++i)
      for (Eigen::Index j = 0; j < tc.A.cols(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g,%d,%d,%.17g,%.17g\n", tc.t, static_cast<int>(i + 1), static_cast<int>(j + 1),
                      tc.A(i, j), tc.ci(i, j));
        os << buf;
      }
}

void write_ergodic_csv(std::ostream& os, const ErgodicCurve& c) {
  os << "t,error,ci_half_width\n";
  char buf[80];
  for (std::size_t k = 0; k < c.t.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", c.t[k], c.error[k], c.ci[k]);
    os << buf;
  }
}

}  // namespace homlab
