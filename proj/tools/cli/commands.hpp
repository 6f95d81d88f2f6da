#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace homlab::cli {

enum ExitCode : int { kOk = 0, kCompareFail = 1, kConfigError = 2, kNumericalFailure = 3 };

struct CliOptions {
  std::string config;
  std::string out;  // overrides output.directory
  int workers = 1;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> inputs;  // compare: reference and candidate A files
  std::optional<double> tol;
  std::string reference;  // estimate: A file for the diagnostics
};

int cmd_medium_sample(const CliOptions& o, std::ostream& log);
int cmd_solve_corrector(const CliOptions& o, std::ostream& log);
int cmd_estimate(const CliOptions& o, std::ostream& log);
int cmd_ergodic(const CliOptions& o, std::ostream& log);
int cmd_compare(const CliOptions& o, std::ostream& log);
int cmd_report(const CliOptions& o, std::ostream& log);

/// Dispatches by subcommand name and maps exceptions to exit codes.
int run_command(const std::string& name, const CliOptions& o, std::ostream& log, std::ostream& err);

}  // namespace homlab::cli
