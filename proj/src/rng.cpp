#include "classicml/rng.hpp"

#include <cmath>
#include <numbers>

#include "classicml/core.hpp"

namespace classicml {

double SeededRng::normal() {
  // Box-Muller; clamp u1 away from zero so log() stays finite.
  double u1 = next_double();
  double u2 = next_double();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::uint64_t> SeededRng::split_seeds(std::uint64_t seed,
                                                  std::size_t k) {
  if (k < 1) {
    throw Error(ErrorCode::invalid_hyperparameter,
                "split requires at least one child stream");
  }
  std::vector<std::uint64_t> seeds(k);
  for (std::size_t i = 0; i < k; ++i) {
    // Child i depends only on (seed, i): one SplitMix64 output taken at the
    // state seed + (i+1)*increment.
    SeededRng child(seed + (i + 1) * 0x9E3779B97F4A7C15ULL);
    seeds[i] = child.next_u64();
  }
  return seeds;
}

std::vector<SeededRng> SeededRng::split(std::size_t k) const {
  std::vector<SeededRng> out;
  out.reserve(k);
  for (std::uint64_t s : split_seeds(state_, k)) out.emplace_back(s);
  return out;
}

}  // namespace classicml
