#pragma once

#include "homlab/corrector.hpp"
#include "homlab/json_io.hpp"
#include "homlab/montecarlo.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace homlab::cli {

struct MediumSection {
  std::string kind;  // periodic | chessboard | constant | periodic1d | elliptic2d
  // periodic
  double alpha = 1.0;
  USpec u;
  // chessboard
  double p = 0.5;
  MollifierSpec mollifier;
  std::array<std::int64_t, 3> extent{256, 256, 256};
  bool periodic = false;
  std::string file;
  // constant
  Mat sigma, H;
  Vec drift;
  // periodic1d
  double a0 = 1.0, a1 = 0.5, v1 = 0.0;
  // elliptic2d
  double kappa = 0.3, eta = 0.0;
};

struct SdeSection {
  double dt = 1e-3;
  std::vector<double> epsilons{0.1};
  double T = 1.0;
  std::vector<double> observation_times{0.5, 1.0};
  std::size_t n_paths = 1000;
  std::size_t n_media = 1;
  bool random_start = true;
  std::size_t batches = 20;
};

struct ErgodicSection {
  std::string observable = "a_11";
  ErgodicSpec spec;
};

struct OutputSection {
  std::string directory = "out";
  std::vector<std::string> formats{"json", "csv"};

  bool csv() const;
};

struct RunConfig {
  std::uint64_t seed = 0;
  MediumSection medium;
  std::optional<SdeSection> sde;
  std::optional<CorrectorConfig> corrector;
  bool write_fields = false;
  std::optional<ErgodicSection> ergodic;
  double compare_tol = 0.1;
  OutputSection output;
};

/// Strict parse: unknown keys and wrong types raise ConfigError.
RunConfig parse_config(const Json& j);
RunConfig load_config(const std::string& path);

/// The configuration with every default filled in.
Json resolved(const RunConfig& c);

/// Medium `index` of the configured family (index 0 for single-medium commands).
MediumInstance build_medium(const RunConfig& c, std::size_t index = 0);
MediumFamily build_family(const RunConfig& c);

/// Chessboard randomness for medium `index`, sampled or loaded from `file`.
ChessboardRandomness chessboard_randomness(const RunConfig& c, std::size_t index = 0);

}  // namespace homlab::cli
