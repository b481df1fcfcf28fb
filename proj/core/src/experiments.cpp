#include "pifa/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <tuple>
#include <utility>
#include <vector>

#include "pifa/diagnostics.hpp"
#include "pifa/errors.hpp"
#include "pifa/rng.hpp"

namespace pifa {

namespace {

// m equally likely points, centered and scaled to the requested variance.
std::vector<double> centered_points(double variance, std::size_t m) {
  if (variance == 0.0) return {0.0};
  const double c = std::sqrt(12.0 * variance / (double(m) * double(m) - 1.0));
  std::vector<double> pts(m);
  for (std::size_t k = 0; k < m; ++k) pts[k] = c * (double(k) - (double(m) - 1.0) / 2.0);
  return pts;
}

struct SignalSpace {
  ProbabilitySpace space;
  RandomVariable s1, s2, shared, y, x1, x2;
};

SignalSpace build_signal_space(const Example1Config& cfg, double v12) {
  const std::vector<double> p1 = centered_points(cfg.v1, cfg.atoms_per_signal);
  const std::vector<double> p2 = centered_points(cfg.v2, cfg.atoms_per_signal);
  const std::vector<double> p12 = centered_points(v12, cfg.atoms_per_signal);
  const std::vector<double> pr = centered_points(cfg.residual_variance, cfg.atoms_per_signal);

  std::vector<double> s1, s2, s12, y;
  for (double a : p1)
    for (double b : p2)
      for (double c : p12)
        for (double r : pr) {
          s1.push_back(a);
          s2.push_back(b);
          s12.push_back(c);
          y.push_back(a + b + c + r);
        }
  const std::size_t n = y.size();
  ProbabilitySpace space = make_space(std::vector<double>(n, 1.0));

  const RandomVariable rs1(space, s1), rs2(space, s2), rs12(space, s12), ry(space, y);
  const Partition shared_levels = partition_from_rv(space, rs12);
  const Partition info1 = join(partition_from_rv(space, rs1), shared_levels);
  const Partition info2 = join(partition_from_rv(space, rs2), shared_levels);
  RandomVariable x1 = conditional_expectation(space, ry, info1);
  RandomVariable x2 = conditional_expectation(space, ry, info2);
  return SignalSpace{space, rs1, rs2, rs12, ry, std::move(x1), std::move(x2)};
}

struct PoolFit {
  double delta1, delta2, rho;
  std::vector<double> beta;
};

PoolFit fit_pool(const SignalSpace& s) {
  const double d1 = variance(s.space, s.x1);
  const double d2 = variance(s.space, s.x2);
  const double r = covariance(s.space, s.x1, s.x2);
  const std::vector<std::vector<double>> cov{{d1, r}, {r, d2}};
  const std::vector<double> cy{covariance(s.space, s.x1, s.y), covariance(s.space, s.x2, s.y)};
  return PoolFit{d1, d2, r, linear_pool_weights(cov, cy)};
}

}  // namespace

Example1Report run_example1(const Example1Config& cfg) {
  if (cfg.atoms_per_signal < 2) throw InvalidArgument("need at least two atoms per signal");
  if (!(cfg.v1 > 0.0) || !(cfg.v2 > 0.0))
    throw NonTrivialityError("private signal variances must be positive");
  if (cfg.v12 < 0.0) throw InvalidArgument("shared signal variance must be non-negative");
  if (cfg.residual_variance < 0.0) throw InvalidArgument("residual variance must be non-negative");
  if (cfg.pool_weights.size() != 2) throw InvalidArgument("pool needs exactly two weights");
  double wsum = 0.0;
  for (double w : cfg.pool_weights) {
    if (!(w > 0.0)) throw InvalidArgument("pool weights must be strictly positive");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12) throw InvalidArgument("pool weights must sum to one");

  const SignalSpace s = build_signal_space(cfg, cfg.v12);
  const PoolFit fit = fit_pool(s);

  Example1Report rep;
  rep.delta1 = fit.delta1;
  rep.delta2 = fit.delta2;
  rep.rho = fit.rho;
  rep.beta = fit.beta;
  rep.beta_sum = fit.beta[0] + fit.beta[1];
  rep.overweights_shared = variance(s.space, s.shared) > 0.0 && rep.beta_sum > 1.0;

  const std::size_t n = s.space.n_outcomes();
  std::vector<double> lin(n), mean(n), sum(n);
  for (std::size_t i = 0; i < n; ++i) {
    lin[i] = fit.beta[0] * s.x1[i] + fit.beta[1] * s.x2[i];
    mean[i] = cfg.pool_weights[0] * s.x1[i] + cfg.pool_weights[1] * s.x2[i];
    sum[i] = s.x1[i] + s.x2[i];
  }
  const RandomVariable rlin(s.space, lin), rmean(s.space, mean), rsum(s.space, sum);

  for (const RandomVariable* sig : {&s.s1, &s.s2, &s.shared}) {
    const double vs = variance(s.space, *sig);
    rep.signal_loadings.push_back(vs > 0.0 ? covariance(s.space, rlin, *sig) / vs : 0.0);
  }
  rep.pattern_ok = std::abs(rep.signal_loadings[0] - rep.beta[0]) <= 1e-9 &&
                   std::abs(rep.signal_loadings[1] - rep.beta[1]) <= 1e-9 &&
                   (variance(s.space, s.shared) == 0.0 ||
                    std::abs(rep.signal_loadings[2] - rep.beta_sum) <= 1e-9);

  const RandomVariable xpp = efficient_from_predictions(s.space, s.y, {s.x1, s.x2});
  rep.var_mean = variance(s.space, rmean);
  rep.var_linear = variance(s.space, rlin);
  rep.var_efficient = variance(s.space, xpp);
  rep.p_mean_differs_linear = probability_of_difference(s.space, rmean, rlin);
  rep.p_mean_differs_efficient = probability_of_difference(s.space, rmean, xpp);
  rep.efficient_is_sum = probability_of_difference(s.space, xpp, rsum) == 0.0;

  std::vector<double> grid_values{0.2, 0.4, 0.6, 0.8, 1.0, cfg.v12};
  std::sort(grid_values.begin(), grid_values.end());
  grid_values.erase(std::unique(grid_values.begin(), grid_values.end()), grid_values.end());
  for (double v : grid_values) {
    const PoolFit g = fit_pool(build_signal_space(cfg, v));
    rep.grid.push_back(
        Example1GridRow{v, g.delta1, g.delta2, g.rho, g.beta[0], g.beta[1], g.beta[0] + g.beta[1]});
  }
  rep.grid_decreasing = true;
  for (std::size_t i = 0; i + 1 < rep.grid.size(); ++i)
    rep.grid_decreasing = rep.grid_decreasing && rep.grid[i].beta_sum > rep.grid[i + 1].beta_sum;
  return rep;
}

Example2Report run_example2() {
  ProbabilitySpace space = make_space(std::vector<double>(6, 1.0));
  RandomVariable y(space, {0, 1, 0, 1, 0, 1});
  const Partition info1(6, {{0}, {1, 2, 3, 4, 5}});
  const Partition info2(6, {{5}, {0, 1, 2, 3, 4}});
  RandomVariable x1 = calibrate(space, y, info1).prediction;
  RandomVariable x2 = calibrate(space, y, info2).prediction;
  RandomVariable xpp = efficient_from_predictions(space, y, {x1, x2});

  std::vector<double> mean(6);
  for (std::size_t i = 0; i < 6; ++i) mean[i] = 0.5 * x1[i] + 0.5 * x2[i];
  RandomVariable xw(space, mean);

  Example2Report rep{space,
                     std::move(y),
                     std::move(x1),
                     std::move(x2),
                     std::move(xpp),
                     std::move(xw),
                     {},
                     0.0,
                     0.0,
                     0.0,
                     0.0,
                     0.0};
  for (std::size_t i = 0; i < 6; ++i)
    rep.hull.push_back(hull_classify({rep.x1[i], rep.x2[i]}, rep.x_efficient[i]));

  rep.var_mean = variance(rep.space, rep.x_mean);
  rep.var_recalibrated = variance(rep.space, recalibrate(rep.space, rep.y, rep.x_mean));
  rep.var_efficient = variance(rep.space, rep.x_efficient);
  rep.calibration_gap_mean = check_calibration(rep.space, rep.y, rep.x_mean).gap;
  rep.inefficiency_mass = inefficiency_probability(rep.space, rep.x_mean, rep.x_efficient);
  return rep;
}

namespace {

// Sorted partition points of the two dyadic interval forecasters.
std::pair<std::vector<double>, std::vector<double>> dyadic_points(std::size_t depth) {
  std::vector<double> tau1, tau2;
  for (std::size_t k = 1; k <= depth; ++k) {
    const double p = std::ldexp(2.0 / 3.0, -static_cast<int>(k));
    tau1.push_back(p);
    tau1.push_back(1.0 - p);
  }
  tau2.push_back(0.5);
  for (std::size_t k = 1; k <= depth; ++k) {
    const double q = std::ldexp(1.0, -static_cast<int>(k) - 1);
    tau2.push_back(q);
    tau2.push_back(1.0 - q);
  }
  std::sort(tau1.begin(), tau1.end());
  std::sort(tau2.begin(), tau2.end());
  return {std::move(tau1), std::move(tau2)};
}

std::pair<double, double> interval_bracket(const std::vector<double>& pts, double omega) {
  const auto it = std::upper_bound(pts.begin(), pts.end(), omega);
  if (it == pts.begin() || it == pts.end())
    throw DepthTooSmall("outcome falls in an unresolved boundary atom; increase the depth");
  return {*(it - 1), *it};
}

}  // namespace

Example3Report run_example3(const Example3Config& cfg) {
  if (cfg.sequence != SequenceChoice::dyadic) throw InvalidArgument("unknown sequence choice");
  if (cfg.depth < 2) throw InvalidArgument("depth must be at least 2");
  if (!(cfg.omega > 0.0) || !(cfg.omega < 1.0))
    throw DomainError("outcome must lie strictly inside the unit interval");

  const auto [tau1, tau2] = dyadic_points(cfg.depth);
  for (const auto* pts : {&tau1, &tau2})
    for (double p : *pts)
      if (std::abs(cfg.omega - p) <= 1e-15)
        throw BoundaryOmega("outcome coincides with a partition point");

  // The two point sets must strictly interleave; the efficient forecast's
  // interior position rests on this.
  std::vector<std::pair<double, int>> merged;
  for (double p : tau1) merged.emplace_back(p, 1);
  for (double p : tau2) merged.emplace_back(p, 2);
  std::sort(merged.begin(), merged.end());
  bool alternation = true;
  for (std::size_t i = 0; i + 1 < merged.size(); ++i)
    alternation = alternation && merged[i].first < merged[i + 1].first &&
                  merged[i].second != merged[i + 1].second;

  Example3Report rep;
  rep.omega = cfg.omega;
  rep.depth = cfg.depth;
  rep.alternation_ok = alternation;

  std::tie(rep.atom1_lo, rep.atom1_hi) = interval_bracket(tau1, cfg.omega);
  std::tie(rep.atom2_lo, rep.atom2_hi) = interval_bracket(tau2, cfg.omega);
  rep.x1 = 0.5 * (rep.atom1_lo + rep.atom1_hi);
  rep.x2 = 0.5 * (rep.atom2_lo + rep.atom2_hi);
  rep.joint_lo = std::max(rep.atom1_lo, rep.atom2_lo);
  rep.joint_hi = std::min(rep.atom1_hi, rep.atom2_hi);
  rep.x_efficient = 0.5 * (rep.joint_lo + rep.joint_hi);

  const double lo = std::min(rep.x1, rep.x2);
  const double hi = std::max(rep.x1, rep.x2);
  rep.closed_form = rep.x2 < 0.5 ? (2.0 / 3.0) * lo + (1.0 / 3.0) * hi
                                 : (1.0 / 3.0) * lo + (2.0 / 3.0) * hi;
  rep.closed_form_ok = std::abs(rep.x_efficient - rep.closed_form) <= 1e-12;
  rep.interior = lo < rep.x_efficient && rep.x_efficient < hi;

  char note[160];
  std::snprintf(note, sizeof note,
                "depth %zu resolves (%.17g, %.17g); outcomes outside are rejected",
                cfg.depth, std::min(tau1.front(), tau2.front()),
                std::max(tau1.back(), tau2.back()));
  rep.truncation_note = note;
  return rep;
}

double WeightRule::b(std::size_t j) const {
  switch (kind) {
    case Kind::equal: return 1.0;
    case Kind::linear: return double(j);
    case Kind::geometric: return std::pow(ratio, double(j));
  }
  throw InvalidArgument("unknown weight rule");
}

std::string WeightRule::name() const {
  switch (kind) {
    case Kind::equal: return "equal";
    case Kind::linear: return "linear";
    case Kind::geometric: return "geometric";
  }
  return "unknown";
}

JamisonReport jamison_check(const std::function<double(std::size_t)>& b, double t_max,
                            std::size_t n_max) {
  if (!(t_max > 1.0)) throw InvalidArgument("t_max must exceed 1");
  if (n_max == 0) throw InvalidArgument("n_max must be positive");

  JamisonReport rep;
  rep.t_max = t_max;
  const std::size_t t_cells = static_cast<std::size_t>(t_max);
  std::vector<std::size_t> counts(t_cells, 0);

  double total = 0.0;
  std::size_t streak = 0;
  bool stopped_early = false;
  std::size_t scanned = 0;
  for (std::size_t j = 1; j <= n_max; ++j) {
    const double bj = b(j);
    if (!std::isfinite(bj)) break;  // weights grew past representable range
    if (bj <= 0.0) throw NonPositiveWeight("weight rule produced a non-positive term");
    total += bj;
    scanned = j;
    const double r = total / bj;
    if (r <= t_max) {
      streak = 0;
      const std::size_t cell = static_cast<std::size_t>(std::ceil(r));
      if (cell >= 1 && cell <= t_cells) ++counts[cell - 1];
    } else if (++streak >= 256) {
      // The ratio has cleared the horizon and stayed there; for the weight
      // rules of interest it is non-decreasing, so the census is complete.
      stopped_early = true;
      break;
    }
  }
  rep.n_scanned = scanned;
  rep.horizon_exhausted = !stopped_early;

  std::size_t running = 0;
  std::size_t next_sparse = 1;
  for (std::size_t t = 1; t <= t_cells; ++t) {
    running += counts[t - 1];
    const double ratio = double(running) / double(t);
    rep.sup_ratio = std::max(rep.sup_ratio, ratio);
    if (t == next_sparse || t == t_cells) {
      rep.ratios.emplace_back(double(t), ratio);
      while (next_sparse <= t) next_sparse *= 10;
    }
  }
  return rep;
}

bool jamison_ok(const JamisonReport& report) { return !report.horizon_exhausted; }

Corollary1Report run_corollary1(const ProbabilitySpace& space, const RandomVariable& y,
                                const Corollary1Config& cfg) {
  validate(cfg.menu);
  ensure_on_space(space, y);
  for (const Partition& part : cfg.menu.partitions)
    if (part.n_outcomes() != space.n_outcomes())
      throw SizeMismatch("menu partition does not match the outcome space");
  if (cfg.realized_outcome >= space.n_outcomes())
    throw InvalidArgument("realized outcome is out of range");
  if (cfg.n_max == 0) throw InvalidArgument("need at least one forecaster");

  Corollary1Report rep;
  rep.jamison = jamison_check([&](std::size_t j) { return cfg.weight_rule.b(j); },
                              cfg.jamison_t_max, cfg.jamison_n_max);
  if (!jamison_ok(rep.jamison))
    throw JamisonViolation("weight rule '" + cfg.weight_rule.name() +
                           "' fails the counting-function bound; the weighted mean need not "
                           "converge");

  const std::size_t m = cfg.menu.partitions.size();
  std::vector<RandomVariable> preds;
  preds.reserve(m);
  for (const Partition& part : cfg.menu.partitions)
    preds.push_back(calibrate(space, y, part).prediction);

  const std::size_t w = cfg.realized_outcome;
  rep.mixture_target = 0.0;
  for (std::size_t i = 0; i < m; ++i) rep.mixture_target += cfg.menu.probs[i] * preds[i][w];

  Partition support_join = Partition::trivial(space.n_outcomes());
  Partition level_join = Partition::trivial(space.n_outcomes());
  for (std::size_t i = 0; i < m; ++i) {
    if (cfg.menu.probs[i] <= 0.0) continue;
    support_join = join(support_join, cfg.menu.partitions[i]);
    level_join = join(level_join, partition_from_rv(space, preds[i]));
  }
  rep.efficient_value = conditional_expectation(space, y, support_join)[w];
  rep.sigma_predictions_coarser = !(level_join == support_join);

  rep.menu_disagrees = false;
  for (std::size_t i = 0; i < m && !rep.menu_disagrees; ++i)
    for (std::size_t k = i + 1; k < m && !rep.menu_disagrees; ++k)
      if (cfg.menu.probs[i] > 0.0 && cfg.menu.probs[k] > 0.0)
        rep.menu_disagrees = probability_of_difference(space, preds[i], preds[k]) > 0.0;

  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < m; ++i) {
    if (cfg.menu.probs[i] <= 0.0) continue;
    const double v = preds[i][w];
    lo = first ? v : std::min(lo, v);
    hi = first ? v : std::max(hi, v);
    first = false;
  }
  const double spread = hi - lo;

  const Rng master(cfg.seed);
  std::vector<double> draws;
  draws.reserve(cfg.n_max);
  double num = 0.0, den = 0.0, sq = 0.0;
  rep.trace.reserve(cfg.n_max);
  for (std::size_t j = 0; j < cfg.n_max; ++j) {
    Rng sub = master.substream(j);
    const std::size_t idx = sample_menu_index(cfg.menu, sub);
    const double value = noisy_prediction(preds[idx][w], cfg.noise, sub);
    draws.push_back(value);
    const double bj = cfg.weight_rule.b(j + 1);
    num += bj * value;
    den += bj;
    sq += bj * bj;
    const double agg = num / den;
    rep.trace.push_back(TracePoint{j + 1, agg, std::abs(agg - rep.mixture_target),
                                   std::abs(agg - rep.efficient_value)});
  }
  rep.final_aggregate = rep.trace.back().aggregate;

  double dmean = 0.0;
  for (double v : draws) dmean += v;
  dmean /= double(draws.size());
  double s2 = 0.0;
  for (double v : draws) s2 += (v - dmean) * (v - dmean);
  s2 = draws.size() > 1 ? s2 / double(draws.size() - 1) : 0.0;
  rep.standard_error = std::sqrt(s2) * std::sqrt(sq) / den;

  rep.conv_tol = 4.0 * (cfg.noise.stddev() + spread) / std::sqrt(double(cfg.n_max));
  rep.converged = rep.trace.back().dist_mixture <= rep.conv_tol;
  rep.hull_interior =
      spread <= 1e-9 || (lo < rep.final_aggregate && rep.final_aggregate < hi);
  return rep;
}

}  // namespace pifa
