#include "pifa/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pifa/errors.hpp"

namespace pifa {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

json parse_text(const std::string& text) {
  json j = json::parse(text, nullptr, false, /*ignore_comments=*/true);
  if (j.is_discarded()) throw ConfigError("configuration is not valid JSON");
  if (!j.is_object()) throw ConfigError("configuration root must be an object");
  return j;
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const char* k : required)
    if (!obj.contains(k)) fail(where, std::string("missing required key '") + k + "'");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : required) known = known || it.key() == k;
    for (const char* k : optional) known = known || it.key() == k;
    if (!known) fail(where, "unknown key '" + it.key() + "'");
  }
}

double read_double(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number()) fail(where, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::uint64_t read_u64(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                 v.get<long long>() < 0))
    fail(where, std::string("'") + key + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string read_string(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_string()) fail(where, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> read_double_array(const json& obj, const char* key,
                                      const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_array()) fail(where, std::string("'") + key + "' must be an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& e : v) {
    if (!e.is_number()) fail(where, std::string("'") + key + "' must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

ProbabilitySpace read_space(const json& root, const std::string& where) {
  check_keys(root.at("space"), where + ".space", {"weights"}, {});
  try {
    return make_space(read_double_array(root.at("space"), "weights", where + ".space"));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(where + ".space", e.what());
  }
}

RandomVariable read_outcome(const json& root, const ProbabilitySpace& space,
                            const std::string& where) {
  check_keys(root.at("outcome"), where + ".outcome", {"values"}, {});
  try {
    return RandomVariable(space, read_double_array(root.at("outcome"), "values",
                                                   where + ".outcome"));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(where + ".outcome", e.what());
  }
}

Partition read_partition(const json& obj, std::size_t n, const std::string& where) {
  check_keys(obj, where, {"blocks"}, {});
  const json& b = obj.at("blocks");
  if (!b.is_array()) fail(where, "'blocks' must be an array of index arrays");
  std::vector<std::vector<std::size_t>> blocks;
  for (const json& blk : b) {
    if (!blk.is_array()) fail(where, "'blocks' must be an array of index arrays");
    std::vector<std::size_t> indices;
    for (const json& e : blk) {
      if (!e.is_number_integer() || (!e.is_number_unsigned() && e.get<long long>() < 0))
        fail(where, "outcome indices must be non-negative integers");
      indices.push_back(e.get<std::size_t>());
    }
    blocks.push_back(std::move(indices));
  }
  try {
    return Partition(n, blocks);
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

std::string default_label(const AggregatorSpec& spec) {
  char buf[48];
  switch (spec.kind) {
    case AggregatorKind::arithmetic: return "arithmetic";
    case AggregatorKind::median: return "median";
    case AggregatorKind::midrange: return "midrange";
    case AggregatorKind::trimmed:
      std::snprintf(buf, sizeof buf, "trimmed(%g)", spec.trim_fraction);
      return buf;
    case AggregatorKind::winsorized:
      std::snprintf(buf, sizeof buf, "winsorized(%g)", spec.trim_fraction);
      return buf;
    case AggregatorKind::quasi_arithmetic:
      switch (spec.transform) {
        case TransformKind::logit: return "logit";
        case TransformKind::probit: return "probit";
        case TransformKind::power:
          std::snprintf(buf, sizeof buf, "power(%g)", spec.a);
          return buf;
      }
  }
  return "aggregator";
}

AggregatorChoice read_aggregator(const json& obj, std::size_t n_forecasters,
                                 const std::string& where) {
  check_keys(obj, where, {"kind"}, {"weights", "transform", "a", "trim_fraction", "label"});
  const std::string kind = read_string(obj, "kind", where);

  AggregatorChoice choice;
  if (kind == "efficient") {
    for (const char* k : {"weights", "transform", "a", "trim_fraction"})
      if (obj.contains(k))
        fail(where, std::string("'") + k + "' does not apply to the efficient aggregator");
    choice.efficient = true;
    choice.label = obj.contains("label") ? read_string(obj, "label", where) : "efficient";
    return choice;
  }

  AggregatorSpec spec;
  if (kind == "arithmetic") {
    spec = AggregatorSpec::arithmetic();
  } else if (kind == "quasi_arithmetic") {
    const std::string transform =
        obj.contains("transform") ? read_string(obj, "transform", where) : "power";
    if (transform == "power") {
      spec = AggregatorSpec::power_mean(obj.contains("a") ? read_double(obj, "a", where) : 1.0);
    } else if (transform == "logit") {
      spec = AggregatorSpec::logit_mean();
    } else if (transform == "probit") {
      spec = AggregatorSpec::probit_mean();
    } else {
      fail(where, "unknown transform '" + transform + "'");
    }
    if (transform != "power" && obj.contains("a"))
      fail(where, "'a' applies only to the power transform");
  } else if (kind == "median") {
    spec = AggregatorSpec::median();
  } else if (kind == "midrange") {
    spec = AggregatorSpec::midrange();
  } else if (kind == "trimmed" || kind == "winsorized") {
    const double tf =
        obj.contains("trim_fraction") ? read_double(obj, "trim_fraction", where) : 0.0;
    if (!(tf >= 0.0 && tf < 0.5)) fail(where, "'trim_fraction' must lie in [0, 0.5)");
    spec = kind == "trimmed" ? AggregatorSpec::trimmed(tf) : AggregatorSpec::winsorized(tf);
  } else {
    fail(where, "unknown aggregator kind '" + kind + "'");
  }

  if (obj.contains("weights")) {
    if (spec.kind != AggregatorKind::arithmetic &&
        spec.kind != AggregatorKind::quasi_arithmetic)
      fail(where, "'weights' apply only to arithmetic and quasi-arithmetic means");
    std::vector<double> w = read_double_array(obj, "weights", where);
    if (w.size() != n_forecasters)
      fail(where, "'weights' must have one entry per forecaster");
    double sum = 0.0;
    for (double x : w) {
      if (x < 0.0) fail(where, "'weights' must be non-negative");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) fail(where, "'weights' must sum to one");
    spec.weights = std::move(w);
  }

  choice.spec = spec;
  choice.label = obj.contains("label") ? read_string(obj, "label", where) : default_label(spec);
  return choice;
}

NoiseModel read_noise(const json& obj, const std::string& where) {
  check_keys(obj, where, {"kind"}, {"sigma", "half_width"});
  const std::string kind = read_string(obj, "kind", where);
  NoiseModel model;
  if (kind == "additive") {
    model.kind = NoiseKind::additive;
  } else if (kind == "logit_additive") {
    model.kind = NoiseKind::logit_additive;
  } else {
    fail(where, "unknown noise kind '" + kind + "'");
  }
  const bool has_sigma = obj.contains("sigma");
  const bool has_width = obj.contains("half_width");
  if (has_sigma == has_width) fail(where, "give exactly one of 'sigma' or 'half_width'");
  model.family = has_sigma ? ErrorFamily::gaussian : ErrorFamily::uniform;
  model.scale = read_double(obj, has_sigma ? "sigma" : "half_width", where);
  if (model.scale < 0.0) fail(where, "noise scale must be non-negative");
  return model;
}

WeightRule read_weight_rule(const json& obj, const std::string& where) {
  check_keys(obj, where, {"rule"}, {"ratio"});
  const std::string rule = read_string(obj, "rule", where);
  WeightRule out;
  if (rule == "equal") {
    out.kind = WeightRule::Kind::equal;
  } else if (rule == "linear") {
    out.kind = WeightRule::Kind::linear;
  } else if (rule == "geometric") {
    out.kind = WeightRule::Kind::geometric;
  } else {
    fail(where, "unknown weight rule '" + rule + "'");
  }
  if (obj.contains("ratio")) {
    if (out.kind != WeightRule::Kind::geometric)
      fail(where, "'ratio' applies only to the geometric rule");
    out.ratio = read_double(obj, "ratio", where);
    if (!(out.ratio > 0.0)) fail(where, "'ratio' must be positive");
  }
  return out;
}

}  // namespace

DiagnoseJob parse_diagnose_config(const std::string& text) {
  const json root = parse_text(text);
  check_keys(root, "config", {"space", "outcome", "forecasters", "aggregators"},
             {"seed", "options"});

  ProbabilitySpace space = read_space(root, "config");
  RandomVariable y = read_outcome(root, space, "config");

  const json& fj = root.at("forecasters");
  if (!fj.is_array() || fj.empty())
    fail("config.forecasters", "need a non-empty array of partitions");
  std::vector<Partition> infos;
  for (std::size_t i = 0; i < fj.size(); ++i)
    infos.push_back(read_partition(fj[i], space.n_outcomes(),
                                   "config.forecasters[" + std::to_string(i) + "]"));

  const json& aj = root.at("aggregators");
  if (!aj.is_array() || aj.empty())
    fail("config.aggregators", "need a non-empty array of aggregator specs");
  std::vector<AggregatorChoice> aggregators;
  for (std::size_t i = 0; i < aj.size(); ++i)
    aggregators.push_back(
        read_aggregator(aj[i], infos.size(), "config.aggregators[" + std::to_string(i) + "]"));

  DiagnoseOptions options;
  if (root.contains("options")) {
    const json& oj = root.at("options");
    check_keys(oj, "config.options", {},
               {"calibration_tol", "level_tol", "eq_tol", "subset_budget"});
    if (oj.contains("calibration_tol"))
      options.calibration_tol = read_double(oj, "calibration_tol", "config.options");
    if (oj.contains("level_tol")) options.level_tol = read_double(oj, "level_tol", "config.options");
    if (oj.contains("eq_tol")) options.eq_tol = read_double(oj, "eq_tol", "config.options");
    if (oj.contains("subset_budget"))
      options.subset_budget =
          static_cast<std::size_t>(read_u64(oj, "subset_budget", "config.options"));
  }
  bool seed_given = false;
  if (root.contains("seed")) {
    options.seed = read_u64(root, "seed", "config");
    seed_given = true;
  }
  return DiagnoseJob{std::move(space), std::move(y), std::move(infos), std::move(aggregators),
                     options, seed_given};
}

SimulateJob parse_simulate_config(const std::string& text) {
  const json root = parse_text(text);
  check_keys(root, "config",
             {"space", "outcome", "menu", "noise", "n_max", "weights", "realized_outcome"},
             {"seed", "jamison"});

  ProbabilitySpace space = read_space(root, "config");
  RandomVariable y = read_outcome(root, space, "config");

  Corollary1Config cfg;
  const json& mj = root.at("menu");
  check_keys(mj, "config.menu", {"partitions", "probs"}, {});
  const json& pj = mj.at("partitions");
  if (!pj.is_array() || pj.empty())
    fail("config.menu.partitions", "need a non-empty array of partitions");
  for (std::size_t i = 0; i < pj.size(); ++i)
    cfg.menu.partitions.push_back(read_partition(
        pj[i], space.n_outcomes(), "config.menu.partitions[" + std::to_string(i) + "]"));
  cfg.menu.probs = read_double_array(mj, "probs", "config.menu");
  try {
    validate(cfg.menu);
  } catch (const Error& e) {
    fail("config.menu", e.what());
  }

  cfg.noise = read_noise(root.at("noise"), "config.noise");
  cfg.n_max = static_cast<std::size_t>(read_u64(root, "n_max", "config"));
  if (cfg.n_max == 0) fail("config", "'n_max' must be at least 1");
  cfg.weight_rule = read_weight_rule(root.at("weights"), "config.weights");
  cfg.realized_outcome = static_cast<std::size_t>(read_u64(root, "realized_outcome", "config"));
  if (cfg.realized_outcome >= space.n_outcomes())
    fail("config", "'realized_outcome' is out of range");

  if (root.contains("jamison")) {
    const json& jj = root.at("jamison");
    check_keys(jj, "config.jamison", {}, {"t_max", "n_max"});
    if (jj.contains("t_max")) {
      cfg.jamison_t_max = read_double(jj, "t_max", "config.jamison");
      if (!(cfg.jamison_t_max > 1.0)) fail("config.jamison", "'t_max' must exceed 1");
    }
    if (jj.contains("n_max"))
      cfg.jamison_n_max = static_cast<std::size_t>(read_u64(jj, "n_max", "config.jamison"));
  }

  bool seed_given = false;
  if (root.contains("seed")) {
    cfg.seed = read_u64(root, "seed", "config");
    seed_given = true;
  }
  return SimulateJob{std::move(space), std::move(y), std::move(cfg), seed_given};
}

Example1Config parse_example1_config(const std::string& text) {
  const json root = parse_text(text);
  check_keys(root, "config", {},
             {"v1", "v2", "v12", "atoms_per_signal", "residual_variance", "pool_weights"});
  Example1Config cfg;
  if (root.contains("v1")) cfg.v1 = read_double(root, "v1", "config");
  if (root.contains("v2")) cfg.v2 = read_double(root, "v2", "config");
  if (root.contains("v12")) cfg.v12 = read_double(root, "v12", "config");
  if (root.contains("atoms_per_signal"))
    cfg.atoms_per_signal = static_cast<std::size_t>(read_u64(root, "atoms_per_signal", "config"));
  if (root.contains("residual_variance"))
    cfg.residual_variance = read_double(root, "residual_variance", "config");
  if (root.contains("pool_weights"))
    cfg.pool_weights = read_double_array(root, "pool_weights", "config");
  return cfg;
}

Example3Config parse_example3_config(const std::string& text) {
  const json root = parse_text(text);
  check_keys(root, "config", {}, {"omega", "depth", "sequence"});
  Example3Config cfg;
  if (root.contains("omega")) cfg.omega = read_double(root, "omega", "config");
  if (root.contains("depth"))
    cfg.depth = static_cast<std::size_t>(read_u64(root, "depth", "config"));
  if (root.contains("sequence")) {
    const std::string seq = read_string(root, "sequence", "config");
    if (seq != "dyadic") fail("config", "unknown sequence '" + seq + "'");
    cfg.sequence = SequenceChoice::dyadic;
  }
  return cfg;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex_digest(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

}  // namespace pifa
