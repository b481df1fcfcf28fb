#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace pifa {

struct CommandOptions {
  std::string config_path;  // empty: no --config given
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_given = false;  // --seed beats a seed inside the config
  bool quiet = false;
};

// Flag-level tweaks for the worked examples; set fields win over the config.
struct ExampleOverrides {
  std::optional<double> v1, v2, v12, residual_variance, omega;
  std::optional<std::uint64_t> atoms, depth;
};

// Exit codes: 0 all checks pass, 1 an invariant check failed (named on err),
// 2 configuration problem, 3 weight rule fails the counting-function bound.
// Standard output carries the manifest path and nothing else.
int cmd_example(int which, const CommandOptions& opts, const ExampleOverrides& overrides,
                std::ostream& out, std::ostream& err);
int cmd_diagnose(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace pifa
