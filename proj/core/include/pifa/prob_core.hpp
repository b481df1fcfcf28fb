#pragma once

#include <cstdint>
#include <vector>

#include "pifa/errors.hpp"

namespace pifa {

// Finite probability space: outcome weights, normalized to sum exactly 1
// (the final entry absorbs the rounding residue).  Spaces are
// immutable; each carries a unique identity so variables and partitions
// cannot silently cross between spaces.
class ProbabilitySpace {
 public:
  std::size_t n_outcomes() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }
  std::uint64_t id() const { return id_; }

  friend ProbabilitySpace make_space(std::vector<double> weights);

 private:
  ProbabilitySpace() = default;
  std::vector<double> weights_;
  std::uint64_t id_ = 0;
};

// Throws EmptyWeights / NegativeWeight / ZeroMass.
ProbabilitySpace make_space(std::vector<double> weights);

// Real-valued function of the outcome index, bound to one space.
class RandomVariable {
 public:
  RandomVariable(const ProbabilitySpace& space, std::vector<double> values);

  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  std::uint64_t space_id() const { return space_id_; }

 private:
  std::uint64_t space_id_;
  std::vector<double> values_;
};

// Partition of {0, ..., n-1} into disjoint non-empty blocks covering all
// outcomes.  Canonical form: indices sorted within blocks, blocks sorted by
// their smallest member.  Stands in for a finitely generated sigma-field.
class Partition {
 public:
  Partition(std::size_t n_outcomes, std::vector<std::vector<std::size_t>> blocks);

  static Partition trivial(std::size_t n);   // single block {0..n-1}
  static Partition discrete(std::size_t n);  // n singleton blocks

  std::size_t n_outcomes() const { return n_; }
  std::size_t n_blocks() const { return blocks_.size(); }
  const std::vector<std::vector<std::size_t>>& blocks() const { return blocks_; }
  std::size_t block_of(std::size_t outcome) const { return block_index_[outcome]; }

  bool operator==(const Partition& other) const {
    return n_ == other.n_ && blocks_ == other.blocks_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::vector<std::size_t>> blocks_;
  std::vector<std::size_t> block_index_;
};

// Level sets of x: outcomes whose values are chained within `tol` of each
// other share a block (transitive closure, so blocks can be wider than tol).
Partition partition_from_rv(const ProbabilitySpace& space, const RandomVariable& x,
                            double tol = 1e-9);

// Coarsest common refinement: non-empty pairwise block intersections.
Partition join(const Partition& p, const Partition& q);

// True iff every block of `fine` is contained in one block of `coarse`.
bool refines(const Partition& fine, const Partition& coarse);

// E(Y | G) as a random variable constant on the blocks of G.  Blocks of
// probability zero get the unconditional mean of y.
RandomVariable conditional_expectation(const ProbabilitySpace& space, const RandomVariable& y,
                                       const Partition& g);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

Moments moments(const ProbabilitySpace& space, const RandomVariable& x);
double mean(const ProbabilitySpace& space, const RandomVariable& x);
double variance(const ProbabilitySpace& space, const RandomVariable& x);
double covariance(const ProbabilitySpace& space, const RandomVariable& x,
                  const RandomVariable& y);

// Probability that |x - z| > tol (pointwise over outcome weights).
double probability_of_difference(const ProbabilitySpace& space, const RandomVariable& x,
                                 const RandomVariable& z, double tol = 1e-9);

// Internal guard: throws SpaceMismatch / SizeMismatch.
void ensure_on_space(const ProbabilitySpace& space, const RandomVariable& x);

}  // namespace pifa
