#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pifa/aggregators.hpp"
#include "pifa/diagnostics.hpp"
#include "pifa/experiments.hpp"
#include "pifa/prob_core.hpp"

namespace pifa {

// One aggregator to diagnose; "efficient" is a pseudo-kind resolved at run
// time instead of through an AggregatorSpec.
struct AggregatorChoice {
  std::string label;
  bool efficient = false;
  AggregatorSpec spec = AggregatorSpec::arithmetic();
};

struct DiagnoseJob {
  ProbabilitySpace space;
  RandomVariable y;
  std::vector<Partition> infos;
  std::vector<AggregatorChoice> aggregators;
  DiagnoseOptions options;
  bool seed_given = false;
};

struct SimulateJob {
  ProbabilitySpace space;
  RandomVariable y;
  Corollary1Config config;
  bool seed_given = false;
};

// Configuration documents are JSON with // comments allowed.  All parsers
// enforce the schema strictly (unknown keys are errors) and throw
// ConfigError with the offending path in the message.
DiagnoseJob parse_diagnose_config(const std::string& text);
SimulateJob parse_simulate_config(const std::string& text);
Example1Config parse_example1_config(const std::string& text);
Example3Config parse_example3_config(const std::string& text);

// 17 significant digits: round-trip exact for doubles.
std::string format_double(double v);

// FNV-1a, used to fingerprint resolved configurations.
std::uint64_t fnv1a64(std::string_view s);
std::string hex_digest(std::uint64_t v);

}  // namespace pifa
