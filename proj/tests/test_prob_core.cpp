#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "pifa/prob_core.hpp"
#include "pifa/rng.hpp"
#include "support/random_cases.hpp"

using namespace pifa;
using testsupport::random_grid_values;
using testsupport::random_integer_weights;
using testsupport::random_partition;

namespace {

// Oracle: group outcomes by chaining |x_i - x_j| <= tol, as explicit
// connected components over the pair graph (independent of the sweep the
// library uses).
std::vector<std::vector<std::size_t>> closure_groups(const std::vector<double>& v, double tol) {
  const std::size_t n = v.size();
  std::vector<std::size_t> comp(n, n);
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (comp[i] != n) continue;
    comp[i] = next;
    std::vector<std::size_t> frontier{i};
    while (!frontier.empty()) {
      const std::size_t a = frontier.back();
      frontier.pop_back();
      for (std::size_t b = 0; b < n; ++b)
        if (comp[b] == n && std::abs(v[a] - v[b]) <= tol) {
          comp[b] = next;
          frontier.push_back(b);
        }
    }
    ++next;
  }
  std::vector<std::vector<std::size_t>> blocks(next);
  for (std::size_t i = 0; i < n; ++i) blocks[comp[i]].push_back(i);
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return blocks;
}

// Oracle: direct weighted sums per block.
std::vector<double> direct_cond_exp(const ProbabilitySpace& s, const RandomVariable& y,
                                    const Partition& g) {
  double mu0_num = 0.0, mu0_den = 0.0;
  for (std::size_t i = 0; i < s.n_outcomes(); ++i) {
    mu0_num += s.weight(i) * y[i];
    mu0_den += s.weight(i);
  }
  const double mu0 = mu0_num / mu0_den;
  std::vector<double> out(s.n_outcomes());
  for (const auto& block : g.blocks()) {
    double num = 0.0, den = 0.0;
    for (auto i : block) {
      num += s.weight(i) * y[i];
      den += s.weight(i);
    }
    const double val = den > 0.0 ? num / den : mu0;
    for (auto i : block) out[i] = val;
  }
  return out;
}

// The die space with Y = "face is even" and the two one-face observers.
struct DieScenario {
  ProbabilitySpace space = make_space({1, 1, 1, 1, 1, 1});
  RandomVariable y{space, {0, 1, 0, 1, 0, 1}};
  Partition sees_one{6, {{0}, {1, 2, 3, 4, 5}}};
  Partition sees_six{6, {{5}, {0, 1, 2, 3, 4}}};
};

}  // namespace

TEST_CASE("make_space normalizes and validates") {
  auto s = make_space({2, 0, 2});
  CHECK(s.n_outcomes() == 3);
  CHECK(s.weight(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.weight(1) == 0.0);
  CHECK(s.weight(2) == doctest::Approx(0.5).epsilon(1e-15));

  auto t = make_space({3, 1});
  CHECK(t.weight(0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(t.weight(1) == doctest::Approx(0.25).epsilon(1e-15));

  CHECK_THROWS_AS(make_space({}), EmptyWeights);
  CHECK_THROWS_AS(make_space({1, -1}), NegativeWeight);
  CHECK_THROWS_AS(make_space({0, 0}), ZeroMass);
}

TEST_CASE("make_space weight sums are exact for many random draws") {
  Rng rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng.next_below(100);
    std::vector<double> w(n);
    for (auto& v : w) v = rng.next_uniform(0.0, 10.0);
    w[rng.next_below(n)] = 0.0;
    double total = 0.0;
    for (double v : w) total += v;
    if (total <= 0.0) continue;
    auto s = make_space(w);
    double sum = 0.0;
    for (double v : s.weights()) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("variables are bound to their space") {
  auto s = make_space({1, 1});
  auto t = make_space({1, 1});
  RandomVariable x(s, {0.0, 1.0});
  CHECK_THROWS_AS(RandomVariable(s, {0.0, 1.0, 2.0}), SizeMismatch);
  CHECK_THROWS_AS(conditional_expectation(t, x, Partition::trivial(2)), SpaceMismatch);
}

TEST_CASE("partition construction validates blocks") {
  CHECK_NOTHROW(Partition(3, {{2, 0}, {1}}));
  CHECK_THROWS_AS(Partition(3, {{0}, {1}}), InvalidPartition);          // not covering
  CHECK_THROWS_AS(Partition(3, {{0, 1}, {1, 2}}), InvalidPartition);    // overlap
  CHECK_THROWS_AS(Partition(3, {{0, 1, 2}, {}}), InvalidPartition);     // empty block
  CHECK_THROWS_AS(Partition(3, {{0, 1, 2, 3}}), InvalidPartition);      // out of range
  // canonical form
  Partition p(4, {{3, 1}, {2, 0}});
  CHECK(p.blocks() == std::vector<std::vector<std::size_t>>{{0, 2}, {1, 3}});
  CHECK(p.block_of(3) == 1);
}

TEST_CASE("partition_from_rv groups by transitive closure") {
  DieScenario die;
  auto x1 = conditional_expectation(die.space, die.y, die.sees_one);
  auto lv = partition_from_rv(die.space, x1);
  CHECK(lv.blocks() == std::vector<std::vector<std::size_t>>{{0}, {1, 2, 3, 4, 5}});

  auto s = make_space({1, 1, 1});
  RandomVariable chain(s, {0.1, 0.1 + 1e-9, 0.2});
  auto p = partition_from_rv(s, chain, 1e-6);
  CHECK(p.blocks() == std::vector<std::vector<std::size_t>>{{0, 1}, {2}});

  RandomVariable c(s, {3.0, 3.0, 3.0});
  CHECK(partition_from_rv(s, c) == Partition::trivial(3));

  // chained values merge even when endpoints differ by more than tol
  auto s4 = make_space({1, 1, 1, 1});
  RandomVariable ch(s4, {0.0, 0.9e-9, 1.8e-9, 5.0});
  CHECK(partition_from_rv(s4, ch).blocks() ==
        std::vector<std::vector<std::size_t>>{{0, 1, 2}, {3}});

  Rng rng(11);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 2 + rng.next_below(30);
    auto sp = make_space(random_integer_weights(rng, n));
    std::vector<double> vals(n);
    for (auto& v : vals) v = rng.next_below(6) * 0.25 + (rng.next_below(3) == 0 ? 1e-10 : 0.0);
    RandomVariable x(sp, vals);
    const double tol = 1e-9;
    CHECK(partition_from_rv(sp, x, tol).blocks() == closure_groups(vals, tol));
  }
}

TEST_CASE("join is the coarsest common refinement") {
  DieScenario die;
  auto x1 = conditional_expectation(die.space, die.y, die.sees_one);
  auto x2 = conditional_expectation(die.space, die.y, die.sees_six);
  auto j = join(partition_from_rv(die.space, x1), partition_from_rv(die.space, x2));
  CHECK(j.blocks() == std::vector<std::vector<std::size_t>>{{0}, {1, 2, 3, 4}, {5}});

  Rng prng(3);
  auto p = random_partition(prng, 12);
  CHECK(join(p, p) == p);
  CHECK(join(p, Partition::discrete(12)) == Partition::discrete(12));
  CHECK(join(p, Partition::trivial(12)) == p);

  CHECK_THROWS_AS(join(Partition::trivial(3), Partition::trivial(4)), SizeMismatch);

  Rng rng(13);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 3 + rng.next_below(40);
    auto a = random_partition(rng, n, 2, 7);
    auto b = random_partition(rng, n, 2, 7);
    auto jj = join(a, b);
    CHECK(refines(jj, a));
    CHECK(refines(jj, b));
    // coarsest: outcomes sharing blocks in both a and b share a block in jj
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v)
        if (a.block_of(u) == a.block_of(v) && b.block_of(u) == b.block_of(v))
          CHECK(jj.block_of(u) == jj.block_of(v));
  }
}

TEST_CASE("conditional expectation against direct sums") {
  DieScenario die;
  auto x1 = conditional_expectation(die.space, die.y, die.sees_one);
  for (double v : std::vector<double>{x1[1], x1[2], x1[3], x1[4], x1[5]})
    CHECK(v == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(x1[0] == 0.0);

  auto x2 = conditional_expectation(die.space, die.y, die.sees_six);
  CHECK(x2[5] == 1.0);
  CHECK(x2[0] == doctest::Approx(0.4).epsilon(1e-15));

  // trivial partition gives the unconditional mean everywhere
  auto m = conditional_expectation(die.space, die.y, Partition::trivial(6));
  for (std::size_t i = 0; i < 6; ++i) CHECK(m[i] == doctest::Approx(0.5).epsilon(1e-15));

  // zero-probability block falls back to the unconditional mean
  auto s = make_space({1, 0, 1});
  RandomVariable y(s, {0, 7, 1});
  auto ce = conditional_expectation(s, y, Partition::discrete(3));
  CHECK(ce[0] == 0.0);
  CHECK(ce[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(ce[2] == 1.0);

  Rng rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 3 + rng.next_below(30);
    auto sp = make_space(random_integer_weights(rng, n));
    RandomVariable yy(sp, random_grid_values(rng, n, false));
    auto g = random_partition(rng, n, 1, 6);
    auto got = conditional_expectation(sp, yy, g);
    auto want = direct_cond_exp(sp, yy, g);
    for (std::size_t i = 0; i < n; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-14));
  }
}

TEST_CASE("tower property") {
  Rng rng(19);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 4 + rng.next_below(60);
    auto sp = make_space(random_integer_weights(rng, n));
    RandomVariable y(sp, random_grid_values(rng, n, false));
    auto coarse = random_partition(rng, n, 2, 5);
    auto fine = join(coarse, random_partition(rng, n, 2, 6));
    auto inner = conditional_expectation(sp, y, fine);
    auto lhs = conditional_expectation(sp, inner, coarse);
    auto rhs = conditional_expectation(sp, y, coarse);
    for (std::size_t i = 0; i < n; ++i)
      if (sp.weight(i) > 0) CHECK(std::abs(lhs[i] - rhs[i]) <= 1e-10);
  }
}

TEST_CASE("refinement cannot decrease conditional variance") {
  Rng rng(23);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 4 + rng.next_below(60);
    auto sp = make_space(random_integer_weights(rng, n));
    RandomVariable y(sp, random_grid_values(rng, n, false));
    auto coarse = random_partition(rng, n, 2, 5);
    auto fine = join(coarse, random_partition(rng, n, 2, 6));
    CHECK(variance(sp, conditional_expectation(sp, y, fine)) + 1e-12 >=
          variance(sp, conditional_expectation(sp, y, coarse)));
  }
}

TEST_CASE("finest partition reproduces y; conditioning is a fixed point") {
  Rng rng(29);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 3 + rng.next_below(40);
    auto sp = make_space(random_integer_weights(rng, n));
    RandomVariable y(sp, random_grid_values(rng, n, false));
    auto fullinfo = conditional_expectation(sp, y, Partition::discrete(n));
    for (std::size_t i = 0; i < n; ++i)
      if (sp.weight(i) > 0) CHECK(fullinfo[i] == y[i]);

    auto g = random_partition(rng, n, 2, 6);
    auto x = conditional_expectation(sp, y, g);
    auto again = conditional_expectation(sp, y, partition_from_rv(sp, x, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      if (sp.weight(i) > 0) CHECK(std::abs(again[i] - x[i]) <= 1e-9);
  }
}

TEST_CASE("moments and covariance") {
  DieScenario die;
  auto m = moments(die.space, die.y);
  CHECK(m.mean == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m.variance == doctest::Approx(0.25).epsilon(1e-15));

  auto s = make_space({1, 1});
  RandomVariable c(s, {4.0, 4.0});
  CHECK(variance(s, c) == 0.0);

  // calibrated variables: Cov(X, Y) = Var(X)
  Rng rng(31);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 4 + rng.next_below(60);
    auto sp = make_space(random_integer_weights(rng, n));
    RandomVariable y(sp, random_grid_values(rng, n, false));
    auto x = conditional_expectation(sp, y, random_partition(rng, n, 2, 6));
    CHECK(std::abs(covariance(sp, x, y) - variance(sp, x)) <= 1e-10);
  }
}

TEST_CASE("probability_of_difference") {
  auto s = make_space({1, 1, 1, 1, 1, 1});
  RandomVariable a(s, {0.2, 0.5, 0.5, 0.5, 0.5, 0.8});
  RandomVariable b(s, {0.0, 0.5, 0.5, 0.5, 0.5, 1.0});
  CHECK(probability_of_difference(s, a, b) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(probability_of_difference(s, a, a) == 0.0);
}
