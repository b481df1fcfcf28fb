#include "pifa/forecasters.hpp"

#include <cmath>
#include <utility>

namespace pifa {

Forecaster calibrate(const ProbabilitySpace& space, const RandomVariable& y, Partition info) {
  auto prediction = conditional_expectation(space, y, info);
  return Forecaster{std::move(info), std::move(prediction)};
}

double NoiseModel::stddev() const {
  return family == ErrorFamily::gaussian ? scale : scale / std::sqrt(3.0);
}

double draw_error(const NoiseModel& model, Rng& rng) {
  switch (model.family) {
    case ErrorFamily::gaussian:
      return model.scale * rng.next_gaussian();
    case ErrorFamily::uniform:
      return rng.next_uniform(-model.scale, model.scale);
  }
  return 0.0;
}

double noisy_prediction(double calibrated_value, const NoiseModel& model, Rng& rng) {
  const double eps = draw_error(model, rng);
  switch (model.kind) {
    case NoiseKind::additive:
      return calibrated_value + eps;
    case NoiseKind::logit_additive: {
      if (!(calibrated_value > 0.0 && calibrated_value < 1.0))
        throw DomainError("logit-additive noise needs a value strictly inside (0, 1)");
      const double z = std::log(calibrated_value / (1.0 - calibrated_value)) + eps;
      return 1.0 / (1.0 + std::exp(-z));
    }
  }
  return calibrated_value;
}

void validate(const InformationMenu& menu) {
  if (menu.partitions.empty()) throw EmptyMenu("information menu has no entries");
  if (menu.partitions.size() != menu.probs.size())
    throw SizeMismatch("menu needs one probability per partition");
  const std::size_t n = menu.partitions.front().n_outcomes();
  double total = 0.0;
  for (std::size_t i = 0; i < menu.probs.size(); ++i) {
    if (menu.probs[i] < 0.0) throw NegativeWeight("menu probabilities must be non-negative");
    if (menu.partitions[i].n_outcomes() != n)
      throw SizeMismatch("menu partitions live on different outcome counts");
    total += menu.probs[i];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw InvalidArgument("menu probabilities must sum to 1");
}

std::size_t sample_menu_index(const InformationMenu& menu, Rng& rng) {
  const double u = rng.next_double();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < menu.probs.size(); ++i) {
    acc += menu.probs[i];
    if (u < acc) return i;
  }
  return menu.probs.size() - 1;
}

std::vector<std::size_t> sample_menu_indices(const InformationMenu& menu, std::size_t n,
                                             std::uint64_t seed) {
  validate(menu);
  std::vector<std::size_t> out(n);
  const Rng master(seed);
  for (std::size_t j = 0; j < n; ++j) {
    Rng sub = master.substream(j);
    out[j] = sample_menu_index(menu, sub);
  }
  return out;
}

std::vector<Partition> sample_information_sets(const InformationMenu& menu, std::size_t n,
                                               std::uint64_t seed) {
  std::vector<Partition> out;
  out.reserve(n);
  for (auto i : sample_menu_indices(menu, n, seed)) out.push_back(menu.partitions[i]);
  return out;
}

}  // namespace pifa
