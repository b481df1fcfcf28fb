#pragma once

#include <optional>
#include <vector>

#include "pifa/prob_core.hpp"

namespace pifa {

enum class AggregatorKind { arithmetic, quasi_arithmetic, median, trimmed, winsorized, midrange };
enum class TransformKind { power, logit, probit };

// Declarative description of a pooling rule.  Weights are only meaningful
// for arithmetic / quasi-arithmetic kinds; trim_fraction only for trimmed /
// winsorized; the transform (with exponent `a` for power) only for
// quasi-arithmetic.  power(0) is the geometric mean.
struct AggregatorSpec {
  AggregatorKind kind = AggregatorKind::arithmetic;
  std::optional<std::vector<double>> weights;
  TransformKind transform = TransformKind::power;
  double a = 1.0;
  double trim_fraction = 0.0;

  static AggregatorSpec arithmetic(std::vector<double> weights = {});
  static AggregatorSpec power_mean(double a, std::vector<double> weights = {});
  static AggregatorSpec logit_mean(std::vector<double> weights = {});
  static AggregatorSpec probit_mean(std::vector<double> weights = {});
  static AggregatorSpec median();
  static AggregatorSpec trimmed(double trim_fraction);
  static AggregatorSpec winsorized(double trim_fraction);
  static AggregatorSpec midrange();
};

// Pool one profile of predictions.  `clip_count`, when given, is bumped for
// every probit input clipped into [1e-12, 1 - 1e-12].
double apply(const AggregatorSpec& spec, const std::vector<double>& xs, int* clip_count = nullptr);

// Outcome-wise application over a finite space.
RandomVariable apply_pointwise(const AggregatorSpec& spec, const ProbabilitySpace& space,
                               const std::vector<RandomVariable>& xs, int* clip_count = nullptr);

enum class HullPosition { unanimous, interior, at_min, at_max, outside };

// Position of `value` relative to the hull of xs.  Unanimity (all xs within
// tie_tol) is reported first; ties with an extreme count as at_min/at_max.
HullPosition hull_classify(const std::vector<double>& xs, double value, double tie_tol = 1e-9);
const char* to_string(HullPosition p);

// sigma(X_1, ..., X_N): join of the predictions' level-set partitions.
Partition prediction_sigma_field(const ProbabilitySpace& space,
                                 const std::vector<RandomVariable>& predictions,
                                 double level_tol = 1e-9);

// E(Y | X_1, ..., X_N) where X_j = E(Y | info_j): the revealed-information
// optimum.  Conditions on what the predictions distinguish, which can be
// strictly coarser than the join of the information partitions.
RandomVariable efficient_aggregator(const ProbabilitySpace& space, const RandomVariable& y,
                                    const std::vector<Partition>& infos, double level_tol = 1e-9);
RandomVariable efficient_from_predictions(const ProbabilitySpace& space, const RandomVariable& y,
                                          const std::vector<RandomVariable>& predictions,
                                          double level_tol = 1e-9);

// Solve cov * beta = cov_with_y for the variance-optimal linear pool.
// Throws SingularCovariance when the system is numerically singular
// (1-norm condition estimate above 1e12).
std::vector<double> linear_pool_weights(const std::vector<std::vector<double>>& cov,
                                        const std::vector<double>& cov_with_y);

}  // namespace pifa
