#include "rz/random.hpp"

#include "rz/traffic_model.hpp"

namespace rz {

std::size_t sample_index(std::span<const double> weights, std::mt19937_64& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw DomainError("sample_index needs a positive weight");
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

}  // namespace rz
