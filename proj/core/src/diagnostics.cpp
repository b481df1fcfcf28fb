#include "pifa/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "pifa/aggregators.hpp"
#include "pifa/rng.hpp"

namespace pifa {

CalibrationCheck check_calibration(const ProbabilitySpace& space, const RandomVariable& y,
                                   const RandomVariable& x, double tol, double level_tol) {
  ensure_on_space(space, y);
  ensure_on_space(space, x);
  const auto levels = partition_from_rv(space, x, level_tol);
  double gap = 0.0;
  for (const auto& atom : levels.blocks()) {
    double mass = 0.0, y_acc = 0.0, x_acc = 0.0;
    for (auto i : atom) {
      mass += space.weight(i);
      y_acc += space.weight(i) * y[i];
      x_acc += space.weight(i) * x[i];
    }
    if (mass <= 0.0) continue;
    gap = std::max(gap, std::abs(y_acc / mass - x_acc / mass));
  }
  return {gap, gap <= tol};
}

namespace {

double subset_conditional_variance(const ProbabilitySpace& space, const RandomVariable& y,
                                   const std::vector<Partition>& levels,
                                   const std::vector<std::size_t>& subset) {
  Partition g = levels[subset.front()];
  for (std::size_t k = 1; k < subset.size(); ++k) g = join(g, levels[subset[k]]);
  return variance(space, conditional_expectation(space, y, g));
}

}  // namespace

std::vector<ExtremizingViolation> check_extremizing(const ProbabilitySpace& space,
                                                    const RandomVariable& y,
                                                    const std::vector<RandomVariable>& predictions,
                                                    const RandomVariable& x,
                                                    std::size_t subset_budget, std::uint64_t seed,
                                                    double level_tol) {
  ensure_on_space(space, y);
  ensure_on_space(space, x);
  if (predictions.empty()) throw InvalidArgument("need at least one prediction");
  const std::size_t n = predictions.size();

  std::vector<Partition> levels;
  levels.reserve(n);
  for (const auto& p : predictions) levels.push_back(partition_from_rv(space, p, level_tol));

  std::vector<std::vector<std::size_t>> subsets;
  if (n <= 12) {
    for (std::uint64_t mask = 1; mask < (1ull << n); ++mask) {
      std::vector<std::size_t> s;
      for (std::size_t j = 0; j < n; ++j)
        if (mask & (1ull << j)) s.push_back(j);
      subsets.push_back(std::move(s));
    }
  } else {
    for (std::size_t j = 0; j < n; ++j) subsets.push_back({j});
    std::vector<std::size_t> full(n);
    for (std::size_t j = 0; j < n; ++j) full[j] = j;
    subsets.push_back(std::move(full));
    Rng rng = Rng(seed).substream(0x5e75);
    for (std::size_t k = 0; k < subset_budget; ++k) {
      std::vector<std::size_t> s;
      for (std::size_t j = 0; j < n; ++j)
        if (rng.next_below(2)) s.push_back(j);
      if (!s.empty()) subsets.push_back(std::move(s));
    }
    std::sort(subsets.begin(), subsets.end());
    subsets.erase(std::unique(subsets.begin(), subsets.end()), subsets.end());
  }

  const double var_x = variance(space, x);
  std::vector<ExtremizingViolation> out;
  for (auto& s : subsets) {
    const double v = subset_conditional_variance(space, y, levels, s);
    if (v > var_x + 1e-10) out.push_back({std::move(s), v, v - var_x});
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.subset < b.subset; });
  return out;
}

RandomVariable recalibrate(const ProbabilitySpace& space, const RandomVariable& y,
                           const RandomVariable& x, double level_tol) {
  return conditional_expectation(space, y, partition_from_rv(space, x, level_tol));
}

double inefficiency_probability(const ProbabilitySpace& space, const RandomVariable& x,
                                const RandomVariable& x_eff, double tol) {
  return probability_of_difference(space, x, x_eff, tol);
}

DiagnosticsReport diagnose(const ProbabilitySpace& space, const RandomVariable& y,
                           const std::vector<RandomVariable>& predictions,
                           const RandomVariable& x, const DiagnoseOptions& opt) {
  DiagnosticsReport rep;
  rep.marginal_gap = std::abs(mean(space, x) - mean(space, y));
  const auto cal = check_calibration(space, y, x, opt.calibration_tol, opt.level_tol);
  rep.calibration_gap = cal.gap;
  rep.calibration_pass = cal.pass;
  rep.extremizing_violations =
      check_extremizing(space, y, predictions, x, opt.subset_budget, opt.seed, opt.level_tol);
  const auto x_eff = efficient_from_predictions(space, y, predictions, opt.level_tol);
  rep.inefficiency_prob = inefficiency_probability(space, x, x_eff, opt.eq_tol);
  rep.var_x = variance(space, x);
  rep.var_recalibrated = variance(space, recalibrate(space, y, x, opt.level_tol));
  rep.var_efficient = variance(space, x_eff);
  return rep;
}

}  // namespace pifa
