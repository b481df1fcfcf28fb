#include "pifa/prob_core.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

namespace pifa {

namespace {
std::uint64_t next_space_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}
}  // namespace

ProbabilitySpace make_space(std::vector<double> weights) {
  if (weights.empty()) throw EmptyWeights("probability space needs at least one outcome");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw NegativeWeight("outcome weights must be non-negative");
    total += w;
  }
  if (total <= 0.0) throw ZeroMass("outcome weights must have positive total mass");

  for (auto& w : weights) w /= total;
  // The final entry absorbs the rounding residue so the weights sum to 1
  // exactly; a residue can only be a few ulp, so clamping keeps it >= 0.
  double partial = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) partial += weights[i];
  weights.back() = std::max(0.0, 1.0 - partial);

  ProbabilitySpace s;
  s.weights_ = std::move(weights);
  s.id_ = next_space_id();
  return s;
}

RandomVariable::RandomVariable(const ProbabilitySpace& space, std::vector<double> values)
    : space_id_(space.id()), values_(std::move(values)) {
  if (values_.size() != space.n_outcomes())
    throw SizeMismatch("variable has " + std::to_string(values_.size()) + " values on a space of " +
                       std::to_string(space.n_outcomes()) + " outcomes");
}

void ensure_on_space(const ProbabilitySpace& space, const RandomVariable& x) {
  if (x.space_id() != space.id()) throw SpaceMismatch("variable belongs to a different space");
  if (x.size() != space.n_outcomes()) throw SizeMismatch("variable/space size mismatch");
}

Partition::Partition(std::size_t n_outcomes, std::vector<std::vector<std::size_t>> blocks)
    : n_(n_outcomes), blocks_(std::move(blocks)), block_index_(n_outcomes, n_outcomes) {
  std::size_t covered = 0;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    auto& block = blocks_[b];
    if (block.empty()) throw InvalidPartition("empty block");
    std::sort(block.begin(), block.end());
    for (auto i : block) {
      if (i >= n_) throw InvalidPartition("outcome index out of range");
      if (block_index_[i] != n_) throw InvalidPartition("blocks overlap");
      block_index_[i] = b;
      ++covered;
    }
  }
  if (covered != n_) throw InvalidPartition("blocks do not cover every outcome");
  // canonical order: blocks sorted by smallest member
  std::sort(blocks_.begin(), blocks_.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    for (auto i : blocks_[b]) block_index_[i] = b;
}

Partition Partition::trivial(std::size_t n) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  return Partition(n, {std::move(all)});
}

Partition Partition::discrete(std::size_t n) {
  std::vector<std::vector<std::size_t>> blocks(n);
  for (std::size_t i = 0; i < n; ++i) blocks[i] = {i};
  return Partition(n, std::move(blocks));
}

Partition partition_from_rv(const ProbabilitySpace& space, const RandomVariable& x, double tol) {
  ensure_on_space(space, x);
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  // In sorted order the transitive closure of |x_i - x_j| <= tol is exactly
  // "cut where consecutive values gap by more than tol".
  std::vector<std::vector<std::size_t>> blocks;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0 || x[order[k]] - x[order[k - 1]] > tol) blocks.emplace_back();
    blocks.back().push_back(order[k]);
  }
  return Partition(n, std::move(blocks));
}

Partition join(const Partition& p, const Partition& q) {
  if (p.n_outcomes() != q.n_outcomes())
    throw SizeMismatch("join of partitions over different outcome counts");
  const std::size_t n = p.n_outcomes();
  // group outcomes by (p-block, q-block)
  std::vector<std::vector<std::size_t>> cell(p.n_blocks() * q.n_blocks());
  for (std::size_t i = 0; i < n; ++i)
    cell[p.block_of(i) * q.n_blocks() + q.block_of(i)].push_back(i);
  std::vector<std::vector<std::size_t>> blocks;
  for (auto& c : cell)
    if (!c.empty()) blocks.push_back(std::move(c));
  return Partition(n, std::move(blocks));
}

bool refines(const Partition& fine, const Partition& coarse) {
  if (fine.n_outcomes() != coarse.n_outcomes()) return false;
  for (const auto& block : fine.blocks()) {
    const std::size_t target = coarse.block_of(block.front());
    for (auto i : block)
      if (coarse.block_of(i) != target) return false;
  }
  return true;
}

RandomVariable conditional_expectation(const ProbabilitySpace& space, const RandomVariable& y,
                                       const Partition& g) {
  ensure_on_space(space, y);
  if (g.n_outcomes() != space.n_outcomes())
    throw SizeMismatch("partition/space size mismatch");
  const double mu0 = mean(space, y);
  std::vector<double> out(space.n_outcomes());
  for (const auto& block : g.blocks()) {
    double num = 0.0, den = 0.0;
    bool constant = true;
    for (auto i : block) {
      num += space.weight(i) * y[i];
      den += space.weight(i);
      constant = constant && y[i] == y[block.front()];
    }
    // A block on which y is constant averages to that constant; bypassing
    // the division keeps singleton blocks bit-exact.
    const double val = den <= 0.0 ? mu0 : (constant ? y[block.front()] : num / den);
    for (auto i : block) out[i] = val;
  }
  return RandomVariable(space, std::move(out));
}

double mean(const ProbabilitySpace& space, const RandomVariable& x) {
  ensure_on_space(space, x);
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m += space.weight(i) * x[i];
  return m;
}

Moments moments(const ProbabilitySpace& space, const RandomVariable& x) {
  const double m = mean(space, x);
  double v = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - m;
    v += space.weight(i) * d * d;
  }
  return {m, v};
}

double variance(const ProbabilitySpace& space, const RandomVariable& x) {
  return moments(space, x).variance;
}

double covariance(const ProbabilitySpace& space, const RandomVariable& x,
                  const RandomVariable& y) {
  ensure_on_space(space, x);
  ensure_on_space(space, y);
  const double mx = mean(space, x), my = mean(space, y);
  double c = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    c += space.weight(i) * (x[i] - mx) * (y[i] - my);
  return c;
}

double probability_of_difference(const ProbabilitySpace& space, const RandomVariable& x,
                                 const RandomVariable& z, double tol) {
  ensure_on_space(space, x);
  ensure_on_space(space, z);
  double p = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::abs(x[i] - z[i]) > tol) p += space.weight(i);
  return p;
}

}  // namespace pifa
