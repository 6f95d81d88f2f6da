#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace homlab::cli;
  CLI::App app{"Homogenization experiments for degenerate diffusions in time-dependent media"};
  app.require_subcommand(1);
  CliOptions o;
  std::uint64_t seed = 0;

  auto common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    if (config_required) c->required();
    sub->add_option("--out", o.out, "output directory (overrides output.directory)");
    sub->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "master seed (overrides the config)");
  };

  common(app.add_subcommand("medium-sample", "sample and persist chessboard randomness"), true);
  common(app.add_subcommand("solve-corrector", "solve the corrector equations and compute A"), true);
  auto* est = app.add_subcommand("estimate", "Monte Carlo estimate of A with diagnostics");
  common(est, true);
  est->add_option("--reference", o.reference, "A file used by the Gaussianity checks")->check(CLI::ExistingFile);
  common(app.add_subcommand("ergodic", "ergodic-average error curve"), true);
  auto* cmp = app.add_subcommand("compare", "relative Frobenius error between two A files");
  common(cmp, false);
  cmp->add_option("files", o.inputs, "reference (corrector) and candidate (Monte Carlo) A files")
      ->expected(2)
      ->required()
      ->check(CLI::ExistingFile);
  cmp->add_option("--tol", o.tol, "pass tolerance");
  common(app.add_subcommand("report", "aggregate outputs into report.json"), false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  const auto* sub = app.get_subcommands().front();
  for (const auto* s : app.get_subcommands())
    if (s->count("--seed")) o.seed = seed;
  return run_command(sub->get_name(), o, std::cout, std::cerr);
}
