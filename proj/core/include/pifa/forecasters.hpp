#pragma once

#include <cstdint>
#include <vector>

#include "pifa/prob_core.hpp"
#include "pifa/rng.hpp"

namespace pifa {

// A calibrated forecaster: reports E(Y | info) and nothing else.
struct Forecaster {
  Partition info;
  RandomVariable prediction;
};

Forecaster calibrate(const ProbabilitySpace& space, const RandomVariable& y, Partition info);

enum class NoiseKind { additive, logit_additive };
enum class ErrorFamily { gaussian, uniform };

// Reporting distortion Q(x, eps) applied to a calibrated value; eps is
// mean-zero and Q is strictly increasing in x for every fixed eps.
struct NoiseModel {
  NoiseKind kind = NoiseKind::additive;
  ErrorFamily family = ErrorFamily::uniform;
  double scale = 0.0;  // sigma for gaussian, half-width for uniform

  double stddev() const;
};

double draw_error(const NoiseModel& model, Rng& rng);
double noisy_prediction(double calibrated_value, const NoiseModel& model, Rng& rng);

// Random information menu: partition H_i is handed out with probability p_i.
struct InformationMenu {
  std::vector<Partition> partitions;
  std::vector<double> probs;
};

void validate(const InformationMenu& menu);

// Draw for position j comes from the substream keyed by j, so growing n
// never reshuffles earlier draws and per-forecaster noise can share the
// same substream downstream.
std::size_t sample_menu_index(const InformationMenu& menu, Rng& rng);
std::vector<std::size_t> sample_menu_indices(const InformationMenu& menu, std::size_t n,
                                             std::uint64_t seed);
std::vector<Partition> sample_information_sets(const InformationMenu& menu, std::size_t n,
                                               std::uint64_t seed);

}  // namespace pifa
