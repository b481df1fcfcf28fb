#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "pifa/aggregators.hpp"
#include "pifa/prob_core.hpp"
#include "pifa/rng.hpp"

using namespace pifa;

namespace {

struct Fixture {
  ProbabilitySpace space;
  RandomVariable y;
  std::vector<Partition> infos;
  std::vector<RandomVariable> predictions;
};

// Deterministic pseudo-random space: n outcomes, m forecasters, dyadic-grid
// outcome values, partitions of 3..8 blocks.
Fixture make_fixture(std::size_t n, std::size_t m) {
  Rng rng(41);
  std::vector<double> w(n), y(n);
  for (auto& v : w) v = static_cast<double>(1 + rng.next_below(8));
  for (auto& v : y) v = static_cast<double>(rng.next_below(9)) / 8.0;
  ProbabilitySpace space = make_space(std::move(w));
  RandomVariable yv(space, std::move(y));
  std::vector<Partition> infos;
  std::vector<RandomVariable> preds;
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t blocks = 3 + rng.next_below(6);
    std::vector<std::vector<std::size_t>> assign(blocks);
    for (std::size_t i = 0; i < n; ++i) assign[rng.next_below(blocks)].push_back(i);
    std::erase_if(assign, [](const auto& b) { return b.empty(); });
    infos.emplace_back(n, std::move(assign));
    preds.push_back(conditional_expectation(space, yv, infos.back()));
  }
  return {std::move(space), std::move(yv), std::move(infos), std::move(preds)};
}

void BM_conditional_expectation(benchmark::State& state) {
  const auto f = make_fixture(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state)
    benchmark::DoNotOptimize(conditional_expectation(f.space, f.y, f.infos[0]));
}
BENCHMARK(BM_conditional_expectation)->Range(8, 4096);

void BM_partition_join(benchmark::State& state) {
  const auto f = make_fixture(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(join(f.infos[0], f.infos[1]));
}
BENCHMARK(BM_partition_join)->Range(8, 4096);

void BM_efficient_aggregator(benchmark::State& state) {
  const auto f = make_fixture(static_cast<std::size_t>(state.range(0)), 6);
  for (auto _ : state)
    benchmark::DoNotOptimize(efficient_from_predictions(f.space, f.y, f.predictions));
}
BENCHMARK(BM_efficient_aggregator)->Range(8, 4096);

void BM_pool_profile(benchmark::State& state) {
  Rng rng(17);
  std::vector<double> xs(static_cast<std::size_t>(state.range(0)));
  for (auto& v : xs) v = (static_cast<double>(rng.next_below(1 << 20)) + 0.5) / (1 << 20);
  const AggregatorSpec spec = AggregatorSpec::trimmed(0.2);
  for (auto _ : state) benchmark::DoNotOptimize(pifa::apply(spec, xs));
}
BENCHMARK(BM_pool_profile)->Range(2, 256);

}  // namespace

BENCHMARK_MAIN();
