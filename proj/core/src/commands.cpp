#include "pifa/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pifa/diagnostics.hpp"
#include "pifa/errors.hpp"
#include "pifa/experiments.hpp"
#include "pifa/io.hpp"

namespace pifa {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Check {
  std::string name;
  std::string anchor;  // identifier of the result the check validates
  bool pass = false;
};

const char* bool_text(bool b) { return b ? "true" : "false"; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read configuration file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

std::uint64_t run_digest(const std::string& command, const std::string& overrides,
                         const std::string& config_text, std::uint64_t seed) {
  const std::string canon = "command=" + command + "\n" + overrides + "config=" + config_text +
                            "\nseed=" + std::to_string(seed) + "\n";
  return fnv1a64(canon);
}

std::string write_manifest(const fs::path& dir, const std::string& command, std::uint64_t digest,
                           std::uint64_t seed, const std::vector<std::string>& outputs,
                           const std::vector<Check>& checks) {
  json m;
  m["artifact_version"] = "0.1.0";
  m["command"] = command;
  m["config_digest"] = hex_digest(digest);
  m["master_seed"] = seed;
  m["outputs"] = outputs;
  m["checks"] = json::array();
  for (const Check& c : checks)
    m["checks"].push_back({{"name", c.name}, {"anchor", c.anchor}, {"pass", c.pass}});
  const fs::path path = dir / "manifest.json";
  write_text(path, m.dump(2) + "\n");
  return path.string();
}

// Writes the manifest, prints its path, and turns failed checks into exit 1
// when they are binding (experiment invariants) rather than report content.
int finish_command(std::ostream& out, std::ostream& err, const fs::path& dir,
                   const std::string& command, std::uint64_t digest, std::uint64_t seed,
                   const std::vector<std::string>& outputs, const std::vector<Check>& checks,
                   bool enforce) {
  out << write_manifest(dir, command, digest, seed, outputs, checks) << "\n";
  bool all_pass = true;
  for (const Check& c : checks)
    if (!c.pass) {
      all_pass = false;
      if (enforce) err << "check failed: " << c.name << " [" << c.anchor << "]\n";
    }
  return enforce && !all_pass ? 1 : 0;
}

std::string override_dump(const ExampleOverrides& ov) {
  std::string s;
  const auto add_d = [&](const char* key, const std::optional<double>& v) {
    if (v) s += std::string(key) + "=" + format_double(*v) + "\n";
  };
  const auto add_u = [&](const char* key, const std::optional<std::uint64_t>& v) {
    if (v) s += std::string(key) + "=" + std::to_string(*v) + "\n";
  };
  add_d("v1", ov.v1);
  add_d("v2", ov.v2);
  add_d("v12", ov.v12);
  add_d("residual_variance", ov.residual_variance);
  add_u("atoms", ov.atoms);
  add_d("omega", ov.omega);
  add_u("depth", ov.depth);
  return s;
}

int run_example1_command(const CommandOptions& opts, const ExampleOverrides& ov,
                         const std::string& config_text, const fs::path& dir, std::ostream& out,
                         std::ostream& err) {
  Example1Config cfg =
      config_text.empty() ? Example1Config{} : parse_example1_config(config_text);
  if (ov.v1) cfg.v1 = *ov.v1;
  if (ov.v2) cfg.v2 = *ov.v2;
  if (ov.v12) cfg.v12 = *ov.v12;
  if (ov.residual_variance) cfg.residual_variance = *ov.residual_variance;
  if (ov.atoms) cfg.atoms_per_signal = static_cast<std::size_t>(*ov.atoms);

  const Example1Report rep = run_example1(cfg);

  std::ostringstream grid;
  grid << "v12,delta1,delta2,rho,beta1,beta2,beta_sum\n";
  for (const Example1GridRow& row : rep.grid)
    grid << format_double(row.v12) << ',' << format_double(row.delta1) << ','
         << format_double(row.delta2) << ',' << format_double(row.rho) << ','
         << format_double(row.beta1) << ',' << format_double(row.beta2) << ','
         << format_double(row.beta_sum) << '\n';
  write_text(dir / "example1_grid.csv", grid.str());

  json summary;
  summary["config"] = {{"v1", cfg.v1},
                       {"v2", cfg.v2},
                       {"v12", cfg.v12},
                       {"atoms_per_signal", cfg.atoms_per_signal},
                       {"residual_variance", cfg.residual_variance},
                       {"pool_weights", cfg.pool_weights}};
  summary["delta1"] = rep.delta1;
  summary["delta2"] = rep.delta2;
  summary["rho"] = rep.rho;
  summary["beta"] = rep.beta;
  summary["beta_sum"] = rep.beta_sum;
  summary["signal_loadings"] = rep.signal_loadings;
  summary["pattern_ok"] = rep.pattern_ok;
  summary["overweights_shared"] = rep.overweights_shared;
  summary["var_mean"] = rep.var_mean;
  summary["var_linear"] = rep.var_linear;
  summary["var_efficient"] = rep.var_efficient;
  summary["p_mean_differs_linear"] = rep.p_mean_differs_linear;
  summary["p_mean_differs_efficient"] = rep.p_mean_differs_efficient;
  summary["efficient_is_sum"] = rep.efficient_is_sum;
  summary["grid_decreasing"] = rep.grid_decreasing;
  write_text(dir / "example1_summary.json", summary.dump(2) + "\n");

  const std::vector<Check> checks{
      {"signal_loadings_match_pool_weights", "Example 1", rep.pattern_ok},
      {"pool_weight_sum_decreases_in_shared_variance", "Example 1", rep.grid_decreasing},
      {"efficient_explains_at_least_linear_pool", "Theorem 1",
       rep.var_efficient >= rep.var_linear - 1e-12},
      {"weighted_mean_differs_from_efficient", "Theorem 2", rep.p_mean_differs_efficient > 0.0}};
  const std::uint64_t seed = opts.seed_given ? opts.seed : 0;
  return finish_command(out, err, dir, "example1",
                        run_digest("example1", override_dump(ov), config_text, seed), seed,
                        {"example1_grid.csv", "example1_summary.json"}, checks, true);
}

int run_example2_command(const CommandOptions& opts, const fs::path& dir, std::ostream& out,
                         std::ostream& err) {
  const Example2Report rep = run_example2();

  std::ostringstream table;
  table << "outcome,weight,y,x1,x2,x_efficient,x_mean,hull\n";
  for (std::size_t i = 0; i < rep.space.n_outcomes(); ++i)
    table << i << ',' << format_double(rep.space.weight(i)) << ',' << format_double(rep.y[i])
          << ',' << format_double(rep.x1[i]) << ',' << format_double(rep.x2[i]) << ','
          << format_double(rep.x_efficient[i]) << ',' << format_double(rep.x_mean[i]) << ','
          << to_string(rep.hull[i]) << '\n';
  write_text(dir / "example2_table.csv", table.str());

  json summary;
  summary["var_mean"] = rep.var_mean;
  summary["var_recalibrated"] = rep.var_recalibrated;
  summary["var_efficient"] = rep.var_efficient;
  summary["calibration_gap_mean"] = rep.calibration_gap_mean;
  summary["inefficiency_mass"] = rep.inefficiency_mass;
  write_text(dir / "example2_summary.json", summary.dump(2) + "\n");

  const double x1_ref[6] = {0.0, 0.6, 0.6, 0.6, 0.6, 0.6};
  const double x2_ref[6] = {0.4, 0.4, 0.4, 0.4, 0.4, 1.0};
  const double xe_ref[6] = {0.0, 0.5, 0.5, 0.5, 0.5, 1.0};
  bool table_ok = true;
  for (std::size_t i = 0; i < 6; ++i)
    table_ok = table_ok && std::abs(rep.x1[i] - x1_ref[i]) <= 1e-15 &&
               std::abs(rep.x2[i] - x2_ref[i]) <= 1e-15 &&
               std::abs(rep.x_efficient[i] - xe_ref[i]) <= 1e-15;

  const CalibrationCheck eff_cal = check_calibration(rep.space, rep.y, rep.x_efficient);
  const bool eff_extremal =
      check_extremizing(rep.space, rep.y, {rep.x1, rep.x2}, rep.x_efficient).empty();
  const double marginal = std::abs(mean(rep.space, rep.x_mean) - mean(rep.space, rep.y));

  const std::vector<Check> checks{
      {"table_matches_reference", "Example 2", table_ok},
      {"efficient_hits_hull_boundary_at_certainty", "Example 2",
       rep.hull.front() == HullPosition::at_min && rep.hull.back() == HullPosition::at_max},
      {"efficient_calibrated_and_extremizing", "Theorem 1", eff_cal.pass && eff_extremal},
      {"mean_consistent_miscalibrated_underconfident", "Theorem 2",
       marginal <= 1e-10 && rep.calibration_gap_mean > 1e-6 &&
           rep.var_mean < rep.var_recalibrated && rep.inefficiency_mass > 0.0}};
  const std::uint64_t seed = opts.seed_given ? opts.seed : 0;
  return finish_command(out, err, dir, "example2", run_digest("example2", "", "", seed), seed,
                        {"example2_table.csv", "example2_summary.json"}, checks, true);
}

int run_example3_command(const CommandOptions& opts, const ExampleOverrides& ov,
                         const std::string& config_text, const fs::path& dir, std::ostream& out,
                         std::ostream& err) {
  Example3Config cfg =
      config_text.empty() ? Example3Config{} : parse_example3_config(config_text);
  if (ov.omega) cfg.omega = *ov.omega;
  if (ov.depth) cfg.depth = static_cast<std::size_t>(*ov.depth);

  const Example3Report rep = run_example3(cfg);

  std::ostringstream table;
  table << "omega,depth,x1,x2,x_efficient,closed_form,interior\n"
        << format_double(rep.omega) << ',' << rep.depth << ',' << format_double(rep.x1) << ','
        << format_double(rep.x2) << ',' << format_double(rep.x_efficient) << ','
        << format_double(rep.closed_form) << ',' << bool_text(rep.interior) << '\n';
  write_text(dir / "example3_table.csv", table.str());

  json summary;
  summary["omega"] = rep.omega;
  summary["depth"] = rep.depth;
  summary["x1"] = rep.x1;
  summary["x2"] = rep.x2;
  summary["x_efficient"] = rep.x_efficient;
  summary["closed_form"] = rep.closed_form;
  summary["interior"] = rep.interior;
  summary["alternation_ok"] = rep.alternation_ok;
  summary["closed_form_ok"] = rep.closed_form_ok;
  summary["atom1"] = {rep.atom1_lo, rep.atom1_hi};
  summary["atom2"] = {rep.atom2_lo, rep.atom2_hi};
  summary["joint_atom"] = {rep.joint_lo, rep.joint_hi};
  summary["truncation_note"] = rep.truncation_note;
  write_text(dir / "example3_summary.json", summary.dump(2) + "\n");

  const std::vector<Check> checks{
      {"partition_points_interleave", "Example 3", rep.alternation_ok},
      {"efficient_matches_two_thirds_rule", "Example 3", rep.closed_form_ok},
      {"efficient_strictly_inside_hull", "Example 3", rep.interior}};
  const std::uint64_t seed = opts.seed_given ? opts.seed : 0;
  return finish_command(out, err, dir, "example3",
                        run_digest("example3", override_dump(ov), config_text, seed), seed,
                        {"example3_table.csv", "example3_summary.json"}, checks, true);
}

}  // namespace

int cmd_example(int which, const CommandOptions& opts, const ExampleOverrides& ov,
                std::ostream& out, std::ostream& err) {
  try {
    const bool has_ex1 = ov.v1 || ov.v2 || ov.v12 || ov.residual_variance || ov.atoms;
    const bool has_ex3 = ov.omega || ov.depth;
    if (which == 1 && has_ex3) {
      err << "--omega/--depth apply to example 3 only\n";
      return 2;
    }
    if (which == 3 && has_ex1) {
      err << "--v1/--v2/--v12/--residual-variance/--atoms apply to example 1 only\n";
      return 2;
    }
    if (which == 2 && (has_ex1 || has_ex3 || !opts.config_path.empty())) {
      err << "example 2 is fully determined and takes no configuration\n";
      return 2;
    }

    const fs::path dir = opts.out_dir.empty() ? fs::path(".") : fs::path(opts.out_dir);
    fs::create_directories(dir);
    const std::string config_text =
        opts.config_path.empty() ? std::string() : read_file(opts.config_path);

    if (which == 1) return run_example1_command(opts, ov, config_text, dir, out, err);
    if (which == 2) return run_example2_command(opts, dir, out, err);
    if (which == 3) return run_example3_command(opts, ov, config_text, dir, out, err);
    err << "unknown example " << which << " (expected 1, 2, or 3)\n";
    return 2;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "invalid run: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_diagnose(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    if (opts.config_path.empty()) {
      err << "diagnose requires --config\n";
      return 2;
    }
    const fs::path dir = opts.out_dir.empty() ? fs::path(".") : fs::path(opts.out_dir);
    fs::create_directories(dir);
    const std::string config_text = read_file(opts.config_path);
    DiagnoseJob job = parse_diagnose_config(config_text);
    if (opts.seed_given) job.options.seed = opts.seed;

    std::vector<RandomVariable> preds;
    preds.reserve(job.infos.size());
    for (const Partition& info : job.infos)
      preds.push_back(calibrate(job.space, job.y, info).prediction);

    std::ostringstream csv;
    csv << "aggregator,marginal_gap,calibration_gap,calibration_pass,extremizing_violations,"
           "inefficiency_prob,variance,variance_recalibrated,variance_efficient\n";
    json rows = json::array();
    std::vector<Check> checks;
    for (const AggregatorChoice& choice : job.aggregators) {
      const RandomVariable x =
          choice.efficient
              ? efficient_from_predictions(job.space, job.y, preds, job.options.level_tol)
              : apply_pointwise(choice.spec, job.space, preds);
      const DiagnosticsReport rep = diagnose(job.space, job.y, preds, x, job.options);

      csv << choice.label << ',' << format_double(rep.marginal_gap) << ','
          << format_double(rep.calibration_gap) << ',' << bool_text(rep.calibration_pass) << ','
          << rep.extremizing_violations.size() << ',' << format_double(rep.inefficiency_prob)
          << ',' << format_double(rep.var_x) << ',' << format_double(rep.var_recalibrated) << ','
          << format_double(rep.var_efficient) << '\n';

      json row;
      row["aggregator"] = choice.label;
      row["marginal_gap"] = rep.marginal_gap;
      row["calibration_gap"] = rep.calibration_gap;
      row["calibration_pass"] = rep.calibration_pass;
      row["inefficiency_prob"] = rep.inefficiency_prob;
      row["variance"] = rep.var_x;
      row["variance_recalibrated"] = rep.var_recalibrated;
      row["variance_efficient"] = rep.var_efficient;
      row["extremizing_violations"] = json::array();
      for (const ExtremizingViolation& v : rep.extremizing_violations)
        row["extremizing_violations"].push_back({{"subset", v.subset},
                                                 {"conditional_variance", v.conditional_variance},
                                                 {"excess", v.excess}});
      rows.push_back(row);

      checks.push_back(Check{"aggregator '" + choice.label + "' calibrated and extremizing",
                             "Theorem 1",
                             rep.calibration_pass && rep.extremizing_violations.empty()});
    }
    write_text(dir / "diagnostics.csv", csv.str());
    json summary;
    summary["rows"] = rows;
    write_text(dir / "diagnostics_summary.json", summary.dump(2) + "\n");

    // Failing rows are findings, not errors: the exit code only reflects
    // whether the diagnosis itself could run.
    return finish_command(out, err, dir, "diagnose",
                          run_digest("diagnose", "", config_text, job.options.seed),
                          job.options.seed, {"diagnostics.csv", "diagnostics_summary.json"},
                          checks, false);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "invalid run: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    if (opts.config_path.empty()) {
      err << "simulate requires --config\n";
      return 2;
    }
    const fs::path dir = opts.out_dir.empty() ? fs::path(".") : fs::path(opts.out_dir);
    fs::create_directories(dir);
    const std::string config_text = read_file(opts.config_path);
    SimulateJob job = parse_simulate_config(config_text);
    if (opts.seed_given) job.config.seed = opts.seed;

    const Corollary1Report rep = run_corollary1(job.space, job.y, job.config);

    std::ostringstream trace;
    trace << "n,aggregate,dist_mixture,dist_efficient\n";
    for (const TracePoint& pt : rep.trace)
      trace << pt.n << ',' << format_double(pt.aggregate) << ','
            << format_double(pt.dist_mixture) << ',' << format_double(pt.dist_efficient) << '\n';
    write_text(dir / "trace.csv", trace.str());

    json summary;
    summary["mixture_target"] = rep.mixture_target;
    summary["efficient_value"] = rep.efficient_value;
    summary["final_aggregate"] = rep.final_aggregate;
    summary["standard_error"] = rep.standard_error;
    summary["conv_tol"] = rep.conv_tol;
    summary["converged"] = rep.converged;
    summary["hull_interior"] = rep.hull_interior;
    summary["menu_disagrees"] = rep.menu_disagrees;
    summary["sigma_predictions_coarser"] = rep.sigma_predictions_coarser;
    summary["jamison"] = {{"t_max", rep.jamison.t_max},
                          {"n_scanned", rep.jamison.n_scanned},
                          {"horizon_exhausted", rep.jamison.horizon_exhausted},
                          {"sup_ratio", rep.jamison.sup_ratio}};
    write_text(dir / "simulate_summary.json", summary.dump(2) + "\n");

    const std::vector<Check> checks{
        {"aggregate_converges_to_mixture_target", "Corollary 1", rep.converged},
        {"aggregate_stays_inside_prediction_hull", "Corollary 1", rep.hull_interior},
        {"weight_rule_passes_counting_bound", "Jamison condition", jamison_ok(rep.jamison)}};
    return finish_command(out, err, dir, "simulate",
                          run_digest("simulate", "", config_text, job.config.seed),
                          job.config.seed, {"trace.csv", "simulate_summary.json"}, checks, true);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const JamisonViolation& e) {
    err << "weight rule rejected: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "invalid run: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace pifa
