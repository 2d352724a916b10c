#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace pseudomode::synth {

// Seed-deterministic across platforms: both generators draw from SplitMix64.
std::vector<double> uniform(std::size_t n, double lo, double hi, std::uint64_t seed);

// floor(mass_fraction * n) copies of mass_value followed by uniform [0, 1] draws.
std::vector<double> point_mass_mixture(std::size_t n, double mass_fraction, double mass_value,
                                       std::uint64_t seed);

}  // namespace pseudomode::synth
