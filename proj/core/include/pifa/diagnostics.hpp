#pragma once

#include <cstdint>
#include <vector>

#include "pifa/prob_core.hpp"

namespace pifa {

struct CalibrationCheck {
  double gap = 0.0;  // worst |E(Y | x-level-set) - x| over positive-mass level sets
  bool pass = false;
};

// A subset of forecaster indices whose revealed information out-predicts x.
struct ExtremizingViolation {
  std::vector<std::size_t> subset;
  double conditional_variance = 0.0;
  double excess = 0.0;  // conditional_variance - Var(x)
};

struct DiagnoseOptions {
  double calibration_tol = 1e-10;
  double level_tol = 1e-9;       // tolerance for grouping level sets
  double eq_tol = 1e-9;          // almost-sure equality tolerance
  std::size_t subset_budget = 200;
  std::uint64_t seed = 0;
};

CalibrationCheck check_calibration(const ProbabilitySpace& space, const RandomVariable& y,
                                   const RandomVariable& x, double tol = 1e-10,
                                   double level_tol = 1e-9);

// Searches subsets v for Var[E(Y | X_j, j in v)] > Var(x) + 1e-10.
// Exhaustive up to 12 forecasters; beyond that, every singleton, the full
// set, and `subset_budget` seeded random subsets.  Violations come back
// sorted by subset.
std::vector<ExtremizingViolation> check_extremizing(const ProbabilitySpace& space,
                                                    const RandomVariable& y,
                                                    const std::vector<RandomVariable>& predictions,
                                                    const RandomVariable& x,
                                                    std::size_t subset_budget = 200,
                                                    std::uint64_t seed = 0,
                                                    double level_tol = 1e-9);

// E(Y | x): the calibrated repair of x.
RandomVariable recalibrate(const ProbabilitySpace& space, const RandomVariable& y,
                           const RandomVariable& x, double level_tol = 1e-9);

// P(|x - x_eff| > tol).
double inefficiency_probability(const ProbabilitySpace& space, const RandomVariable& x,
                                const RandomVariable& x_eff, double tol = 1e-9);

struct DiagnosticsReport {
  double marginal_gap = 0.0;  // |E(x) - E(y)|
  double calibration_gap = 0.0;
  bool calibration_pass = false;
  std::vector<ExtremizingViolation> extremizing_violations;
  double inefficiency_prob = 0.0;
  double var_x = 0.0;
  double var_recalibrated = 0.0;
  double var_efficient = 0.0;
};

DiagnosticsReport diagnose(const ProbabilitySpace& space, const RandomVariable& y,
                           const std::vector<RandomVariable>& predictions,
                           const RandomVariable& x, const DiagnoseOptions& opt = {});

}  // namespace pifa
