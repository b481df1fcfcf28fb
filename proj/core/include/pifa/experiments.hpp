#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pifa/aggregators.hpp"
#include "pifa/forecasters.hpp"
#include "pifa/prob_core.hpp"

namespace pifa {

// --- two experts with private and shared independent signals ---------------

struct Example1Config {
  double v1 = 1.0;                // variance of expert 1's private signal
  double v2 = 1.0;                // variance of expert 2's private signal
  double v12 = 1.0;               // variance of the shared signal
  std::size_t atoms_per_signal = 3;
  double residual_variance = 1.0; // part of Y nobody observes
  std::vector<double> pool_weights{0.5, 0.5};
};

struct Example1GridRow {
  double v12 = 0.0, delta1 = 0.0, delta2 = 0.0, rho = 0.0;
  double beta1 = 0.0, beta2 = 0.0, beta_sum = 0.0;
};

struct Example1Report {
  double delta1 = 0.0, delta2 = 0.0, rho = 0.0;
  std::vector<double> beta;            // variance-optimal linear pool weights
  double beta_sum = 0.0;
  std::vector<double> signal_loadings; // measured loadings of beta.X on (s1, s2, shared)
  bool pattern_ok = false;             // loadings == (beta1, beta2, beta1+beta2)
  bool overweights_shared = false;     // beta_sum > 1
  double var_mean = 0.0, var_linear = 0.0, var_efficient = 0.0;
  double p_mean_differs_linear = 0.0;    // P(X_w != beta.X)
  double p_mean_differs_efficient = 0.0; // P(X_w != X'')
  bool efficient_is_sum = false;         // X'' == X_1 + X_2 (expected when v12 = 0)
  std::vector<Example1GridRow> grid;     // beta_sum along a v12 sweep
  bool grid_decreasing = false;
};

Example1Report run_example1(const Example1Config& cfg);

// --- one die, two one-face observers ----------------------------------------

struct Example2Report {
  ProbabilitySpace space;
  RandomVariable y, x1, x2, x_efficient, x_mean;
  std::vector<HullPosition> hull;  // of X'' against (X1, X2), per outcome
  double var_mean = 0.0, var_recalibrated = 0.0, var_efficient = 0.0;
  double calibration_gap_mean = 0.0;
  double inefficiency_mass = 0.0;  // P(X_w != X'')
};

Example2Report run_example2();

// --- interval forecasts on the unit interval --------------------------------

enum class SequenceChoice { dyadic };

struct Example3Config {
  double omega = 0.6;
  std::size_t depth = 5;  // generated partition points per side
  SequenceChoice sequence = SequenceChoice::dyadic;
};

struct Example3Report {
  double omega = 0.0;
  std::size_t depth = 0;
  double x1 = 0.0, x2 = 0.0, x_efficient = 0.0, closed_form = 0.0;
  bool interior = false;        // min(x1,x2) < X'' < max(x1,x2)
  bool alternation_ok = false;  // generated points strictly interleave
  bool closed_form_ok = false;  // X'' matches the 2/3-1/3 rule within 1e-12
  double atom1_lo = 0.0, atom1_hi = 0.0;
  double atom2_lo = 0.0, atom2_hi = 0.0;
  double joint_lo = 0.0, joint_hi = 0.0;
  std::string truncation_note;
};

Example3Report run_example3(const Example3Config& cfg);

// --- growing noisy crowds ----------------------------------------------------

struct WeightRule {
  enum class Kind { equal, linear, geometric };
  Kind kind = Kind::equal;
  double ratio = 2.0;  // geometric only

  double b(std::size_t j) const;  // 1-indexed term
  std::string name() const;
};

struct JamisonReport {
  double t_max = 0.0;
  std::size_t n_scanned = 0;
  bool horizon_exhausted = false;  // counting function still growing at the horizon
  double sup_ratio = 0.0;          // max over integer t of gamma(t)/t
  std::vector<std::pair<double, double>> ratios;  // (t, gamma(t)/t) on a sparse grid
};

// gamma(t) counts the N with B_N/b_N <= t; the weighted mean converges
// almost surely iff gamma(t)/t stays bounded.
JamisonReport jamison_check(const std::function<double(std::size_t)>& b, double t_max,
                            std::size_t n_max = 1000000);
bool jamison_ok(const JamisonReport& report);

struct Corollary1Config {
  InformationMenu menu;
  NoiseModel noise;
  std::size_t n_max = 10000;
  WeightRule weight_rule;
  std::uint64_t seed = 0;
  std::size_t realized_outcome = 0;
  double jamison_t_max = 10000.0;
  std::size_t jamison_n_max = 1000000;
};

struct TracePoint {
  std::size_t n = 0;
  double aggregate = 0.0;
  double dist_mixture = 0.0;    // |aggregate - mixture target|
  double dist_efficient = 0.0;  // |aggregate - efficient aggregator's value|
};

struct Corollary1Report {
  double mixture_target = 0.0;   // sum_i p_i E(Y|H_i)(omega): the a.s. limit
  double efficient_value = 0.0;  // E(Y | join of positive-probability menu entries)(omega)
  std::vector<TracePoint> trace;
  double final_aggregate = 0.0;
  double standard_error = 0.0;  // weighted-mean standard error from the draws
  double conv_tol = 0.0;        // 4 (noise sd + prediction spread) / sqrt(n_max)
  bool converged = false;
  bool hull_interior = false;   // final aggregate strictly between disagreeing predictions
  bool menu_disagrees = false;  // two positive-probability entries predict differently
  bool sigma_predictions_coarser = false;  // predictions reveal less than the partitions
  JamisonReport jamison;
};

// Throws JamisonViolation when the weight rule fails its check.
Corollary1Report run_corollary1(const ProbabilitySpace& space, const RandomVariable& y,
                                const Corollary1Config& cfg);

}  // namespace pifa
