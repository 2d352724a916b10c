#include "pseudomode/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "pseudomode/detail/splitmix.hpp"

namespace pseudomode::synth {

std::vector<double> uniform(std::size_t n, double lo, double hi, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("synth::uniform: n must be >= 1");
  if (!(lo < hi)) throw std::invalid_argument("synth::uniform: need lo < hi");
  detail::SplitMix64 rng(seed);
  std::vector<double> out(n);
  for (double& v : out) v = lo + (hi - lo) * rng.next_double();
  return out;
}

std::vector<double> point_mass_mixture(std::size_t n, double mass_fraction, double mass_value,
                                       std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("synth::point_mass_mixture: n must be >= 1");
  if (!(mass_fraction >= 0.0 && mass_fraction <= 1.0))
    throw std::invalid_argument("synth::point_mass_mixture: mass_fraction must be in [0, 1]");
  if (!std::isfinite(mass_value))
    throw std::invalid_argument("synth::point_mass_mixture: mass_value must be finite");
  detail::SplitMix64 rng(seed);
  const std::size_t n_mass = static_cast<std::size_t>(mass_fraction * static_cast<double>(n));
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n_mass; ++i) out.push_back(mass_value);
  for (std::size_t i = n_mass; i < n; ++i) out.push_back(rng.next_double());
  return out;
}

}  // namespace pseudomode::synth
