#pragma once

#include <cstdint>
#include <random>

namespace ee {

// Deterministic RNG stream. Independent streams for (seed, purpose, index)
// triples are derived with a splitmix64-style mix so that e.g. every dataset
// record owns its own stream regardless of generation order or thread count.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return unit_(eng_); }                    // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return normal_(eng_); }
  std::uint64_t next_u64() { return eng_(); }
  std::uint64_t below(std::uint64_t n);                       // [0, n)

  std::mt19937_64& engine() { return eng_; }

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b);
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix(mix(a, b), c);
  }
  static Rng stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index) {
    return Rng(mix(mix(seed, purpose), index));
  }

private:
  std::mt19937_64 eng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ee
