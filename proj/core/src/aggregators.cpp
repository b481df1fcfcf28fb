#include "pifa/aggregators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pifa/normal.hpp"

namespace pifa {

AggregatorSpec AggregatorSpec::arithmetic(std::vector<double> weights) {
  AggregatorSpec s;
  s.kind = AggregatorKind::arithmetic;
  if (!weights.empty()) s.weights = std::move(weights);
  return s;
}

AggregatorSpec AggregatorSpec::power_mean(double a, std::vector<double> weights) {
  AggregatorSpec s;
  s.kind = AggregatorKind::quasi_arithmetic;
  s.transform = TransformKind::power;
  s.a = a;
  if (!weights.empty()) s.weights = std::move(weights);
  return s;
}

AggregatorSpec AggregatorSpec::logit_mean(std::vector<double> weights) {
  AggregatorSpec s;
  s.kind = AggregatorKind::quasi_arithmetic;
  s.transform = TransformKind::logit;
  if (!weights.empty()) s.weights = std::move(weights);
  return s;
}

AggregatorSpec AggregatorSpec::probit_mean(std::vector<double> weights) {
  AggregatorSpec s;
  s.kind = AggregatorKind::quasi_arithmetic;
  s.transform = TransformKind::probit;
  if (!weights.empty()) s.weights = std::move(weights);
  return s;
}

AggregatorSpec AggregatorSpec::median() {
  AggregatorSpec s;
  s.kind = AggregatorKind::median;
  return s;
}

AggregatorSpec AggregatorSpec::trimmed(double trim_fraction) {
  if (!(trim_fraction >= 0.0 && trim_fraction < 0.5))
    throw InvalidArgument("trim fraction must lie in [0, 0.5)");
  AggregatorSpec s;
  s.kind = AggregatorKind::trimmed;
  s.trim_fraction = trim_fraction;
  return s;
}

AggregatorSpec AggregatorSpec::winsorized(double trim_fraction) {
  auto s = trimmed(trim_fraction);
  s.kind = AggregatorKind::winsorized;
  return s;
}

AggregatorSpec AggregatorSpec::midrange() {
  AggregatorSpec s;
  s.kind = AggregatorKind::midrange;
  return s;
}

namespace {

constexpr double kProbitClip = 1e-12;

std::vector<double> resolve_weights(const AggregatorSpec& spec, std::size_t n) {
  if (!spec.weights) return std::vector<double>(n, 1.0 / static_cast<double>(n));
  const auto& w = *spec.weights;
  if (w.size() != n)
    throw WeightMismatch("aggregator has " + std::to_string(w.size()) + " weights for " +
                         std::to_string(n) + " inputs");
  double total = 0.0;
  for (double v : w) {
    if (v < 0.0) throw InvalidArgument("aggregator weights must be non-negative");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("aggregator weights must sum to 1");
  return w;
}

double weighted_mean(const std::vector<double>& w, const std::vector<double>& xs) {
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) acc += w[i] * xs[i];
  return acc;
}

double power_transform(double x, double a) {
  if (a == 0.0 || a < 0.0 || a != std::floor(a)) {
    if (x <= 0.0) throw DomainError("power mean with this exponent needs positive inputs");
  }
  return a == 0.0 ? std::log(x) : std::pow(x, a);
}

double power_inverse(double m, double a) {
  if (a == 0.0) return std::exp(m);
  const double r = std::pow(m, 1.0 / a);
  if (!std::isfinite(r)) throw DomainError("power mean fell outside the invertible range");
  return r;
}

double logit(double x) {
  if (!(x > 0.0 && x < 1.0)) throw DomainError("logit transform needs inputs inside (0, 1)");
  return std::log(x / (1.0 - x));
}

double quasi_arithmetic(const AggregatorSpec& spec, const std::vector<double>& w,
                        const std::vector<double>& xs, int* clip_count) {
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double x = xs[i];
    switch (spec.transform) {
      case TransformKind::power:
        acc += w[i] * power_transform(x, spec.a);
        break;
      case TransformKind::logit:
        acc += w[i] * logit(x);
        break;
      case TransformKind::probit: {
        const double clipped = std::clamp(x, kProbitClip, 1.0 - kProbitClip);
        if (clipped != x && clip_count) ++*clip_count;
        acc += w[i] * norm_ppf(clipped);
        break;
      }
    }
  }
  switch (spec.transform) {
    case TransformKind::power:
      return power_inverse(acc, spec.a);
    case TransformKind::logit:
      return 1.0 / (1.0 + std::exp(-acc));
    case TransformKind::probit:
      return norm_cdf(acc);
  }
  return acc;
}

}  // namespace

double apply(const AggregatorSpec& spec, const std::vector<double>& xs, int* clip_count) {
  if (xs.empty()) throw InvalidArgument("cannot aggregate an empty prediction profile");
  const std::size_t n = xs.size();

  switch (spec.kind) {
    case AggregatorKind::arithmetic:
      return weighted_mean(resolve_weights(spec, n), xs);
    case AggregatorKind::quasi_arithmetic:
      return quasi_arithmetic(spec, resolve_weights(spec, n), xs, clip_count);
    case AggregatorKind::median: {
      auto s = xs;
      std::sort(s.begin(), s.end());
      return n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
    }
    case AggregatorKind::trimmed: {
      auto s = xs;
      std::sort(s.begin(), s.end());
      const std::size_t k = static_cast<std::size_t>(spec.trim_fraction * n);
      double acc = 0.0;
      for (std::size_t i = k; i < n - k; ++i) acc += s[i];
      return acc / static_cast<double>(n - 2 * k);
    }
    case AggregatorKind::winsorized: {
      auto s = xs;
      std::sort(s.begin(), s.end());
      const std::size_t k = static_cast<std::size_t>(spec.trim_fraction * n);
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += std::clamp(s[i], s[k], s[n - 1 - k]);
      return acc / static_cast<double>(n);
    }
    case AggregatorKind::midrange: {
      const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
      return 0.5 * (*lo + *hi);
    }
  }
  throw InvalidArgument("unknown aggregator kind");
}

RandomVariable apply_pointwise(const AggregatorSpec& spec, const ProbabilitySpace& space,
                               const std::vector<RandomVariable>& xs, int* clip_count) {
  if (xs.empty()) throw InvalidArgument("cannot aggregate an empty prediction profile");
  for (const auto& x : xs) ensure_on_space(space, x);
  std::vector<double> out(space.n_outcomes());
  std::vector<double> profile(xs.size());
  for (std::size_t w = 0; w < space.n_outcomes(); ++w) {
    for (std::size_t j = 0; j < xs.size(); ++j) profile[j] = xs[j][w];
    out[w] = apply(spec, profile, clip_count);
  }
  return RandomVariable(space, std::move(out));
}

HullPosition hull_classify(const std::vector<double>& xs, double value, double tie_tol) {
  if (xs.empty()) throw InvalidArgument("hull of an empty prediction profile");
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  if (*hi - *lo <= tie_tol) return HullPosition::unanimous;
  if (std::abs(value - *lo) <= tie_tol) return HullPosition::at_min;
  if (std::abs(value - *hi) <= tie_tol) return HullPosition::at_max;
  if (value > *lo && value < *hi) return HullPosition::interior;
  return HullPosition::outside;
}

const char* to_string(HullPosition p) {
  switch (p) {
    case HullPosition::unanimous: return "unanimous";
    case HullPosition::interior: return "interior";
    case HullPosition::at_min: return "at_min";
    case HullPosition::at_max: return "at_max";
    case HullPosition::outside: return "outside";
  }
  return "?";
}

Partition prediction_sigma_field(const ProbabilitySpace& space,
                                 const std::vector<RandomVariable>& predictions,
                                 double level_tol) {
  if (predictions.empty()) throw InvalidArgument("need at least one prediction");
  Partition acc = partition_from_rv(space, predictions.front(), level_tol);
  for (std::size_t j = 1; j < predictions.size(); ++j)
    acc = join(acc, partition_from_rv(space, predictions[j], level_tol));
  return acc;
}

RandomVariable efficient_from_predictions(const ProbabilitySpace& space, const RandomVariable& y,
                                          const std::vector<RandomVariable>& predictions,
                                          double level_tol) {
  return conditional_expectation(space, y, prediction_sigma_field(space, predictions, level_tol));
}

RandomVariable efficient_aggregator(const ProbabilitySpace& space, const RandomVariable& y,
                                    const std::vector<Partition>& infos, double level_tol) {
  if (infos.empty()) throw InvalidArgument("need at least one information partition");
  std::vector<RandomVariable> predictions;
  predictions.reserve(infos.size());
  for (const auto& g : infos) predictions.push_back(conditional_expectation(space, y, g));
  return efficient_from_predictions(space, y, predictions, level_tol);
}

std::vector<double> linear_pool_weights(const std::vector<std::vector<double>>& cov,
                                        const std::vector<double>& cov_with_y) {
  const std::size_t n = cov.size();
  if (n == 0 || cov_with_y.size() != n)
    throw SizeMismatch("covariance matrix and cross-covariance sizes disagree");
  for (const auto& row : cov)
    if (row.size() != n) throw SizeMismatch("covariance matrix is not square");

  // Gauss-Jordan with partial pivoting on [A | I]; the explicit inverse
  // also feeds the 1-norm condition estimate.
  std::vector<std::vector<double>> a(cov);
  std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;

  double norm_a = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < n; ++i) col += std::abs(a[i][j]);
    norm_a = std::max(norm_a, col);
  }

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (a[pivot][col] == 0.0) throw SingularCovariance("covariance matrix is singular");
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    const double d = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= d;
      inv[col][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }

  double norm_inv = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < n; ++i) col += std::abs(inv[i][j]);
    norm_inv = std::max(norm_inv, col);
  }
  if (!(norm_a * norm_inv < 1e12))
    throw SingularCovariance("covariance matrix condition number exceeds 1e12");

  // beta = cov_with_y^T * inv (inv is symmetric for symmetric input)
  std::vector<double> beta(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) beta[i] += cov_with_y[j] * inv[j][i];
  return beta;
}

}  // namespace pifa
