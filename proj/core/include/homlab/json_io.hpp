#pragma once

#include "homlab/control.hpp"
#include "homlab/corrector.hpp"
#include "homlab/effective.hpp"
#include "homlab/media.hpp"
#include "homlab/montecarlo.hpp"
#include "homlab/sde.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace homlab {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Serializes with every number written to 17 significant digits;
/// non-finite numbers become null.
std::string dump_json(const Json& j, int indent = 2);
void write_json_file(const std::string& path, const Json& j);
Json read_json_file(const std::string& path);

Json matrix_to_json(const Mat& A);
Mat matrix_from_json(const Json& j);

Json to_json(const EffectiveDiffusivity& A);
EffectiveDiffusivity effective_from_json(const Json& j);
Json to_json(const ControlConstants& c);
Json to_json(const ControlReport& r);
Json to_json(const CorrectorSolution& s, bool include_history = true);
Json to_json(const CorrectorStudy& s);
Json to_json(const MonteCarloEstimate& e);
Json to_json(const DiagnosticsReport& r);
Json to_json(const ErgodicCurve& c);

/// Colors as integer arrays, shifts, seed, p and the mollifier.
Json to_json(const ChessboardRandomness& r);
ChessboardRandomness chessboard_from_json(const Json& j);

/// Columns: path, step, t, x1..xd.
void write_trajectories_csv(std::ostream& os, const std::vector<Trajectory>& trajectories);

/// Columns: it, i1..id, t, x1..xd, value.
void write_grid_csv(std::ostream& os, const GridFunction& f);

/// Columns: t, i, j, estimate, ci_half_width.
void write_moments_csv(std::ostream& os, const MonteCarloEstimate& e);

/// Columns: t, error, ci_half_width.
void write_ergodic_csv(std::ostream& os, const ErgodicCurve& c);

}  // namespace homlab
