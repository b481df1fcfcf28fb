// Acceptance gate.  Nine release-blocking criteria, one pass/fail line each;
// the process exits non-zero if any criterion fails.  Tolerances and budgets
// are pinned here, not configurable.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "pifa/aggregators.hpp"
#include "pifa/diagnostics.hpp"
#include "pifa/errors.hpp"
#include "pifa/experiments.hpp"
#include "pifa/forecasters.hpp"
#include "pifa/prob_core.hpp"
#include "pifa/rng.hpp"
#include "support/random_cases.hpp"

namespace fs = std::filesystem;
using namespace pifa;

namespace {

int g_failures = 0;

void report(int n, const std::string& label, bool pass, const std::string& detail = "") {
  std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", n, label.c_str(),
              detail.empty() ? "" : " — ", detail.c_str());
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string format_seconds(double s) {
  char buf[64];
  if (s < 1.0)
    std::snprintf(buf, sizeof buf, "%.2f ms", s * 1e3);
  else
    std::snprintf(buf, sizeof buf, "%.2f s", s);
  return buf;
}

constexpr std::uint64_t kSuiteSeed = 2026;
constexpr std::size_t kSuiteCases = 1000;

// ---------------------------------------------------------------------------
// 1. Die example reproduced exactly.

void criterion1() {
  const double kTol = 1e-15;
  const double kBudgetSeconds = 1e-3;

  run_example2();  // warm-up: allocator and code paths
  const auto t0 = std::chrono::steady_clock::now();
  const Example2Report rep = run_example2();
  const double elapsed = seconds_since(t0);

  const std::array<double, 6> x1 = {0.0, 3.0 / 5, 3.0 / 5, 3.0 / 5, 3.0 / 5, 3.0 / 5};
  const std::array<double, 6> x2 = {2.0 / 5, 2.0 / 5, 2.0 / 5, 2.0 / 5, 2.0 / 5, 1.0};
  const std::array<double, 6> xpp = {0.0, 0.5, 0.5, 0.5, 0.5, 1.0};
  bool values_ok = rep.x1.size() == 6;
  for (std::size_t i = 0; values_ok && i < 6; ++i)
    values_ok = std::abs(rep.x1[i] - x1[i]) <= kTol && std::abs(rep.x2[i] - x2[i]) <= kTol &&
                std::abs(rep.x_efficient[i] - xpp[i]) <= kTol;

  const bool fast = elapsed < kBudgetSeconds;
  report(1, "die example reproduced to 1e-15", values_ok && fast,
         (values_ok ? "values exact" : "value mismatch") + std::string(", ") +
             format_seconds(elapsed));
}

// ---------------------------------------------------------------------------
// 2. Weighted means: consistent, miscalibrated, under-confident, inefficient.

std::vector<testsupport::RandomCase> suite_cases() {
  std::vector<testsupport::RandomCase> cases;
  cases.reserve(kSuiteCases);
  for (std::size_t i = 0; i < kSuiteCases; ++i)
    cases.push_back(testsupport::make_random_case(kSuiteSeed, i));
  return cases;
}

void criterion2(const std::vector<testsupport::RandomCase>& cases) {
  const double kMarginalTol = 1e-10;
  const double kGapFloor = 1e-6;
  const double kBudgetSeconds = 30.0;

  const auto t0 = std::chrono::steady_clock::now();
  std::size_t bad = 0;
  for (const auto& c : cases) {
    const RandomVariable xw =
        apply_pointwise(AggregatorSpec::arithmetic(c.pool_weights), c.space, c.predictions);
    const DiagnosticsReport d = diagnose(c.space, c.y, c.predictions, xw);
    double max_var = 0.0;
    for (const auto& p : c.predictions) max_var = std::max(max_var, variance(c.space, p));
    const bool ok = d.marginal_gap <= kMarginalTol && d.calibration_gap > kGapFloor &&
                    d.var_x < d.var_recalibrated && d.var_x < max_var &&
                    d.inefficiency_prob > 0.0;
    if (!ok) ++bad;
  }
  const double elapsed = seconds_since(t0);
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu/%zu cases, %s", cases.size() - bad, cases.size(),
                format_seconds(elapsed).c_str());
  report(2, "weighted means consistent, miscalibrated, under-confident", bad == 0 && elapsed < kBudgetSeconds,
         buf);
}

// ---------------------------------------------------------------------------
// 3. Strict means stay inefficient whenever they act strictly.

void criterion3() {
  const double kBudgetSeconds = 60.0;
  const std::size_t kMinQualified = 50;  // per aggregator, so the claim is not vacuous

  const auto t0 = std::chrono::steady_clock::now();
  struct Entry {
    const char* label;
    AggregatorSpec spec;
  };
  const std::vector<Entry> zoo = {
      {"median", AggregatorSpec::median()},
      {"trimmed(0.2)", AggregatorSpec::trimmed(0.2)},
      {"winsorized(0.2)", AggregatorSpec::winsorized(0.2)},
      {"midrange", AggregatorSpec::midrange()},
      {"logit", AggregatorSpec::logit_mean()},
  };

  testsupport::CaseOptions opt;
  opt.interior_y = true;  // keeps logit transforms in-domain
  std::vector<std::size_t> qualified(zoo.size(), 0);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < kSuiteCases; ++i) {
    const auto c = testsupport::make_random_case(kSuiteSeed + 1, i, opt);
    const RandomVariable xpp = efficient_from_predictions(c.space, c.y, c.predictions);
    for (std::size_t z = 0; z < zoo.size(); ++z) {
      const RandomVariable x = apply_pointwise(zoo[z].spec, c.space, c.predictions);
      bool strict_here = true;
      for (std::size_t w = 0; strict_here && w < c.space.n_outcomes(); ++w) {
        if (c.space.weight(w) <= 0.0) continue;
        std::vector<double> xs(c.predictions.size());
        for (std::size_t j = 0; j < xs.size(); ++j) xs[j] = c.predictions[j][w];
        const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
        if (*hi - *lo == 0.0) continue;  // unanimous outcome: no strictness demand
        strict_here = hull_classify(xs, x[w]) == HullPosition::interior;
      }
      if (!strict_here) continue;
      ++qualified[z];
      if (!(inefficiency_probability(c.space, x, xpp) > 0.0)) ++bad;
    }
  }
  const double elapsed = seconds_since(t0);
  const bool enough =
      std::all_of(qualified.begin(), qualified.end(),
                  [&](std::size_t q) { return q >= kMinQualified; });
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "qualified per rule: %zu/%zu/%zu/%zu/%zu of %zu, failures %zu, %s", qualified[0],
                qualified[1], qualified[2], qualified[3], qualified[4], kSuiteCases, bad,
                format_seconds(elapsed).c_str());
  report(3, "strict means inefficient on every qualifying run",
         bad == 0 && enough && elapsed < kBudgetSeconds, buf);
}

// ---------------------------------------------------------------------------
// 4. The efficient aggregator certifies: calibrated, extremizing, and the
//    atom decomposition of each prediction holds.

void criterion4(const std::vector<testsupport::RandomCase>& cases) {
  const double kCalTol = 1e-10;
  const double kDecompTol = 1e-10;

  std::size_t bad = 0;
  for (const auto& c : cases) {
    const RandomVariable xpp = efficient_from_predictions(c.space, c.y, c.predictions);
    bool ok = check_calibration(c.space, c.y, xpp, kCalTol).pass;
    ok = ok && check_extremizing(c.space, c.y, c.predictions, xpp).empty();
    // Each prediction is the atom-weighted average of the efficient values:
    // X_j(A) = sum_k P(B_k | A) X''(B_k) over the prediction-join atoms B_k.
    for (std::size_t j = 0; ok && j < c.predictions.size(); ++j) {
      const Partition levels = partition_from_rv(c.space, c.predictions[j]);
      const RandomVariable back = conditional_expectation(c.space, xpp, levels);
      for (std::size_t w = 0; ok && w < c.space.n_outcomes(); ++w)
        if (c.space.weight(w) > 0.0)
          ok = std::abs(back[w] - c.predictions[j][w]) <= kDecompTol;
    }
    if (!ok) ++bad;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu/%zu cases", cases.size() - bad, cases.size());
  report(4, "efficient aggregator certified on the random suite", bad == 0, buf);
}

// ---------------------------------------------------------------------------
// 5. Two-expert algebra against the normal-equation oracle.

struct NormalEquationOracle {
  double beta1 = 0.0, beta2 = 0.0;
};

// Builds the 27-point product space from scratch and solves the 2x2 normal
// equations from measured moments.
NormalEquationOracle oracle_beta(double v1, double v2, double v12) {
  const auto points = [](double v) {
    const double c = std::sqrt(12.0 * v / 8.0);  // 3 atoms: m^2 - 1 = 8
    return std::array<double, 3>{-c, 0.0, c};
  };
  const auto p1 = points(v1), p2 = points(v2), p12 = points(v12);
  std::vector<double> w(27, 1.0), s1(27), s2(27), s12(27), y(27);
  std::size_t i = 0;
  for (double a : p1)
    for (double b : p2)
      for (double c : p12) {
        s1[i] = a;
        s2[i] = b;
        s12[i] = c;
        y[i] = a + b + c;
        ++i;
      }
  const ProbabilitySpace space = make_space(w);
  const RandomVariable Y(space, y);
  const auto info = [&](const std::vector<double>& priv) {
    return join(partition_from_rv(space, RandomVariable(space, priv)),
                partition_from_rv(space, RandomVariable(space, s12)));
  };
  const RandomVariable X1 = conditional_expectation(space, Y, info(s1));
  const RandomVariable X2 = conditional_expectation(space, Y, info(s2));
  const double a11 = variance(space, X1), a22 = variance(space, X2);
  const double a12 = covariance(space, X1, X2);
  const double b1 = covariance(space, Y, X1), b2 = covariance(space, Y, X2);
  const double det = a11 * a22 - a12 * a12;
  return {(b1 * a22 - a12 * b2) / det, (a11 * b2 - b1 * a12) / det};
}

void criterion5() {
  const double kBetaTol = 1e-12;
  const double kIndependentTol = 1e-9;

  Example1Config cfg;  // v1 = v2 = v12 = 1
  const Example1Report rep = run_example1(cfg);
  const NormalEquationOracle oracle = oracle_beta(1.0, 1.0, 1.0);
  bool ok = std::abs(rep.beta[0] - oracle.beta1) <= kBetaTol &&
            std::abs(rep.beta[1] - oracle.beta2) <= kBetaTol &&
            std::abs(rep.beta[0] - 2.0 / 3.0) <= kBetaTol &&
            std::abs(rep.beta[1] - 2.0 / 3.0) <= kBetaTol;

  // beta1 + beta2 strictly decreasing over the shared-variance grid.
  std::vector<double> sums;
  for (const auto& row : rep.grid)
    if (row.v12 >= 0.2 - 1e-12) sums.push_back(row.beta_sum);
  ok = ok && sums.size() >= 5;
  for (std::size_t i = 1; i < sums.size(); ++i) ok = ok && sums[i] < sums[i - 1];

  // Independent experts: beta = (1, 1) and the weighted mean still differs
  // from the efficient aggregate for every non-trivial weighting tried.
  Example1Config indep = cfg;
  indep.v12 = 0.0;
  for (const auto& wts : {std::vector<double>{0.5, 0.5}, std::vector<double>{0.3, 0.7},
                          std::vector<double>{0.9, 0.1}}) {
    indep.pool_weights = wts;
    const Example1Report r = run_example1(indep);
    ok = ok && std::abs(r.beta[0] - 1.0) <= kIndependentTol &&
         std::abs(r.beta[1] - 1.0) <= kIndependentTol && r.p_mean_differs_efficient > 0.0;
  }
  report(5, "two-expert loadings match the normal-equation oracle", ok);
}

// ---------------------------------------------------------------------------
// 6. Interval forecasts: frozen point, closed-form branch, strict interiority.

void criterion6() {
  const double kTol = 1e-12;
  bool ok = true;
  for (std::uint64_t depth : {3, 5}) {
    Example3Config cfg;
    cfg.omega = 0.6;
    cfg.depth = depth;
    const Example3Report rep = run_example3(cfg);
    ok = ok && std::abs(rep.x1 - 0.5) <= kTol && std::abs(rep.x2 - 0.625) <= kTol &&
         std::abs(rep.x_efficient - 7.0 / 12.0) <= kTol;
  }

  Rng rng(kSuiteSeed + 2);
  std::size_t done = 0, attempts = 0;
  while (done < 100 && attempts < 1000) {
    ++attempts;
    const double omega = (static_cast<double>(rng.next_below(1 << 20)) + 0.5) / (1 << 20);
    Example3Config cfg;
    cfg.omega = omega;
    cfg.depth = 8;
    Example3Report rep;
    try {
      rep = run_example3(cfg);
    } catch (const BoundaryOmega&) {
      continue;
    } catch (const DepthTooSmall&) {
      continue;
    }
    const double lo = std::min(rep.x1, rep.x2), hi = std::max(rep.x1, rep.x2);
    const double expected =
        rep.x2 < 0.5 ? (2.0 * lo + hi) / 3.0 : (lo + 2.0 * hi) / 3.0;
    ok = ok && std::abs(rep.x_efficient - expected) <= kTol;
    ok = ok && lo < rep.x_efficient && rep.x_efficient < hi;
    ++done;
  }
  ok = ok && done == 100;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%zu random omegas checked", done);
  report(6, "interval forecasts follow the one-third/two-thirds rule", ok, buf);
}

// ---------------------------------------------------------------------------
// 7. Growing crowd concentrates on the mixture target, not the efficient value.

Corollary1Config die_crowd(std::size_t realized) {
  Corollary1Config cfg;
  cfg.menu.partitions = {Partition(6, {{0}, {1, 2, 3, 4, 5}}), Partition(6, {{5}, {0, 1, 2, 3, 4}})};
  cfg.menu.probs = {0.5, 0.5};
  cfg.noise.kind = NoiseKind::additive;
  cfg.noise.family = ErrorFamily::uniform;
  cfg.noise.scale = 0.1;
  cfg.n_max = 10000;
  cfg.realized_outcome = realized;
  cfg.seed = kSuiteSeed;
  return cfg;
}

void criterion7() {
  const double kBudgetSeconds = 10.0;
  const auto t0 = std::chrono::steady_clock::now();
  const ProbabilitySpace space = make_space(std::vector<double>(6, 1.0));
  const RandomVariable y(space, {0, 1, 0, 1, 0, 1});

  // Die face 1: mixture target 1/5, efficient value 0.
  const Corollary1Report a = run_corollary1(space, y, die_crowd(0));
  bool ok = std::abs(a.final_aggregate - a.mixture_target) <= 4.0 * a.standard_error;
  ok = ok && std::abs(a.mixture_target - 0.2) <= 1e-15 && a.efficient_value == 0.0;
  const double gap = std::abs(a.final_aggregate - a.efficient_value);
  ok = ok && gap >= 0.15 && gap <= 0.25;

  // Die face 3: mixture target and efficient value coincide at 1/2.
  const Corollary1Report b = run_corollary1(space, y, die_crowd(2));
  ok = ok && std::abs(b.final_aggregate - b.mixture_target) <= 4.0 * b.standard_error;
  ok = ok && std::abs(b.final_aggregate - b.efficient_value) <= 4.0 * b.standard_error;
  ok = ok && std::abs(b.mixture_target - 0.5) <= 1e-15;

  const double elapsed = seconds_since(t0);
  char buf[128];
  std::snprintf(buf, sizeof buf, "face-1 aggregate %.4f (se %.2e), %s", a.final_aggregate,
                a.standard_error, format_seconds(elapsed).c_str());
  report(7, "crowd aggregate concentrates on the mixture target", ok && elapsed < kBudgetSeconds,
         buf);
}

// ---------------------------------------------------------------------------
// 8. Counting-function bound: equal weights pass at ratio 1, 2^j is rejected.

void criterion8() {
  const JamisonReport equal = jamison_check([](std::size_t) { return 1.0; }, 1e4);
  bool ok = jamison_ok(equal) && equal.sup_ratio >= 0.99 && equal.sup_ratio <= 1.0;

  WeightRule doubling;
  doubling.kind = WeightRule::Kind::geometric;
  doubling.ratio = 2.0;
  const JamisonReport geo = jamison_check([&](std::size_t j) { return doubling.b(j); }, 1e4);
  ok = ok && !jamison_ok(geo);

  char buf[96];
  std::snprintf(buf, sizeof buf, "equal-weight sup %.6f, doubling flagged %s", equal.sup_ratio,
                jamison_ok(geo) ? "no" : "yes");
  report(8, "counting-function bound separates the weight rules", ok, buf);
}

// ---------------------------------------------------------------------------
// 9. Reruns of the command-line tool are byte-identical.

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool dirs_identical(const fs::path& a, const fs::path& b, std::string& why) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  if (names.empty()) {
    why = "no outputs in " + a.string();
    return false;
  }
  for (const auto& name : names) {
    if (!fs::exists(b / name)) {
      why = name + " missing from rerun";
      return false;
    }
    if (slurp(a / name) != slurp(b / name)) {
      why = name + " differs between reruns";
      return false;
    }
  }
  return true;
}

void criterion9() {
  const char* cli = std::getenv("PIFA_CLI");
  if (cli == nullptr) {
    report(9, "command reruns byte-identical", false, "PIFA_CLI not set");
    return;
  }
  const fs::path root = fs::temp_directory_path() / "pifa_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string configs = PIFA_CONFIG_DIR;

  const std::vector<std::pair<std::string, std::string>> runs = {
      {"ex1", std::string(" example 1 --config ") + configs + "/example1.json"},
      {"ex2", " example 2"},
      {"ex3", " example 3 --omega 0.45 --depth 6"},
      {"diag", std::string(" diagnose --config ") + configs + "/diagnose_die.json"},
      {"sim", std::string(" simulate --config ") + configs + "/simulate_die.json"},
      {"sim_seeded", std::string(" simulate --seed 11 --config ") + configs + "/simulate_die.json"},
  };

  bool ok = true;
  std::string why;
  for (const auto& [tag, args] : runs) {
    for (const char* round : {"a", "b"}) {
      const fs::path out = root / (tag + "_" + round);
      const std::string cmd = std::string(cli) + args + " --out " + out.string() +
                              " > /dev/null 2> /dev/null";
      if (std::system(cmd.c_str()) != 0) {
        ok = false;
        why = tag + " exited non-zero";
        break;
      }
    }
    if (!ok) break;
    if (!dirs_identical(root / (tag + "_a"), root / (tag + "_b"), why)) {
      ok = false;
      why = tag + ": " + why;
      break;
    }
  }
  report(9, "command reruns byte-identical", ok, ok ? "6 commands, 2 runs each" : why);
}

}  // namespace

int main() {
  const auto cases = suite_cases();
  criterion1();
  criterion2(cases);
  criterion3();
  criterion4(cases);
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all 9 criteria passed\n");
  return 0;
}
