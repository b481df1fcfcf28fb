// pifa — forecast aggregation laboratory.
//
// Subcommands:
//   example N   reproduce worked example N (1, 2, or 3)
//   diagnose    score a panel of aggregators against the efficient one
//   simulate    run a growing crowd of noisy forecasters
//
// Exit codes: 0 success, 1 a named invariant check failed, 2 bad
// configuration or domain error, 3 weight rule rejected (unbounded
// counting ratio).

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pifa/commands.hpp"

namespace {

void add_common(CLI::App* cmd, pifa::CommandOptions& opts, bool needs_config) {
  auto* config = cmd->add_option("--config", opts.config_path,
                                 "Configuration file (JSON, // comments allowed)");
  if (needs_config) config->required();
  cmd->add_option("--out", opts.out_dir, "Output directory (created if missing)")
      ->capture_default_str();
  cmd->add_option("--seed", opts.seed, "Master seed (overrides any seed in the config)");
  cmd->add_flag("--quiet", opts.quiet, "Suppress progress notes on stderr");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forecast aggregation laboratory"};
  app.require_subcommand(1);

  pifa::CommandOptions ex_opts;
  pifa::ExampleOverrides overrides;
  int which = 0;
  auto* example = app.add_subcommand("example", "Reproduce a worked example");
  example->add_option("which", which, "Example number (1, 2, or 3)")->required();
  add_common(example, ex_opts, /*needs_config=*/false);
  double v1 = 0, v2 = 0, v12 = 0, residual = 0, omega = 0;
  std::uint64_t atoms = 0, depth = 0;
  auto* opt_v1 = example->add_option("--v1", v1, "Private signal variance, expert 1");
  auto* opt_v2 = example->add_option("--v2", v2, "Private signal variance, expert 2");
  auto* opt_v12 = example->add_option("--v12", v12, "Shared signal variance");
  auto* opt_res = example->add_option("--residual-variance", residual,
                                      "Variance of the unobserved residual");
  auto* opt_atoms = example->add_option("--atoms", atoms, "Support points per signal");
  auto* opt_omega = example->add_option("--omega", omega, "Point of [0,1) to evaluate at");
  auto* opt_depth = example->add_option("--depth", depth, "Partition refinement depth");

  pifa::CommandOptions diag_opts;
  auto* diagnose = app.add_subcommand("diagnose", "Score aggregators against the efficient one");
  add_common(diagnose, diag_opts, /*needs_config=*/true);

  pifa::CommandOptions sim_opts;
  auto* simulate = app.add_subcommand("simulate", "Run a growing crowd of noisy forecasters");
  add_common(simulate, sim_opts, /*needs_config=*/true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and friends exit 0; every usage error maps to the
    // configuration-error code.
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (example->parsed()) {
    ex_opts.seed_given = example->count("--seed") > 0;
    if (opt_v1->count()) overrides.v1 = v1;
    if (opt_v2->count()) overrides.v2 = v2;
    if (opt_v12->count()) overrides.v12 = v12;
    if (opt_res->count()) overrides.residual_variance = residual;
    if (opt_atoms->count()) overrides.atoms = atoms;
    if (opt_omega->count()) overrides.omega = omega;
    if (opt_depth->count()) overrides.depth = depth;
    return pifa::cmd_example(which, ex_opts, overrides, std::cout, std::cerr);
  }
  if (diagnose->parsed()) {
    diag_opts.seed_given = diagnose->count("--seed") > 0;
    return pifa::cmd_diagnose(diag_opts, std::cout, std::cerr);
  }
  sim_opts.seed_given = simulate->count("--seed") > 0;
  return pifa::cmd_simulate(sim_opts, std::cout, std::cerr);
}
