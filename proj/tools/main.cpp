#include <iostream>

#include <CLI11.hpp>

#include "runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Differential-space experiments: identity suites, orbit scaling, flows and cohomology"};
  app.require_subcommand(1, 1);

  diffspace::cli::RunOptions options;
  std::string config, out;
  std::uint64_t seed = 0;
  int quad_order = 0, workers = 0;
  double tol = 0.0;

  const char* commands[][2] = {
      {"verify", "Run the identity suites and any configured pairings"},
      {"orbit-demo", "Scaling table over circles and exact orbit-space checks"},
      {"flow", "Integral curves and uniform-domain probes"},
      {"cohomology", "Čech cohomology of covers and de Rham spot checks"},
      {"report", "All of the above in one report"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON config file");
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--quad-order", quad_order, "Gauss-Legendre points per axis")->check(CLI::PositiveNumber);
    sub->add_option("--tol", tol, "Tolerance overriding every check")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : diffspace::cli::kExitConfigError;
  }

  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--config")) options.config_path = config;
  if (sub->count("--seed")) options.seed = seed;
  if (sub->count("--quad-order")) options.quad_order = quad_order;
  if (sub->count("--tol")) options.tolerance = tol;
  if (sub->count("--out")) options.out_dir = out;
  if (sub->count("--workers")) options.workers = workers;
  return diffspace::cli::run_command(sub->get_name(), options, std::cout, std::cerr);
}
