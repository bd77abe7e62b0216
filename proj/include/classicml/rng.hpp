#pragma once

#include <cstdint>
#include <vector>

namespace classicml {

// Deterministic 64-bit generator (SplitMix64). The update rule is fixed so
// that a given seed produces the same sequence on every platform:
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   output = z ^ (z >> 31)
//
// Child streams come from split(); child i is a pure function of
// (seed, i), so parallel consumers stay reproducible no matter how work is
// scheduled.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound).
  std::size_t uniform_int(std::size_t bound) {
    return static_cast<std::size_t>(next_u64() % bound);
  }

  // Standard normal via Box-Muller; consumes two draws per call.
  double normal();

  static std::vector<std::uint64_t> split_seeds(std::uint64_t seed,
                                                std::size_t k);
  std::vector<SeededRng> split(std::size_t k) const;

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace classicml
