#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mycelogic {

std::uint64_t splitmix64(std::uint64_t x);

// Per-component seed: splitmix64(master ^ splitmix64(fnv1a64(component) + index)).
// The rule is written into every run manifest; changing it breaks reproducibility.
std::uint64_t derive_seed(std::uint64_t master, std::string_view component,
                          std::uint64_t index = 0);

// mt19937_64 output is fixed by the standard, but the <random> distributions
// are not, so the draws below are built directly from raw engine bits.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  // [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }
  // Unbiased integer in [0, n).
  std::uint64_t index(std::uint64_t n);
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace mycelogic
