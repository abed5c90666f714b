#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace distflow {

/// Counter-based generator: every draw is a pure function of
/// (master seed, stream, counter), so parallel generation is
/// order-independent and reproducible.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t master_seed) : seed_(master_seed) {}

  std::uint64_t master_seed() const { return seed_; }

  /// Uniform in (0,1).
  double uniform(std::uint64_t stream, std::uint64_t counter) const {
    return to_unit(word(stream, counter));
  }

  /// Standard normal via Box-Muller on two counter words.
  double normal(std::uint64_t stream, std::uint64_t counter) const {
    double u1 = to_unit(word(stream, 2 * counter));
    double u2 = to_unit(word(stream, 2 * counter + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Derive a child seed for a disjoint lineage (nested estimators).
  std::uint64_t child_seed(std::uint64_t stream, std::uint64_t counter) const {
    return word(stream ^ 0xc2b2ae3d27d4eb4fULL, counter);
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t word(std::uint64_t stream, std::uint64_t counter) const {
    std::uint64_t k = mix(seed_);
    k = mix(k ^ stream);
    return mix(k ^ counter);
  }

  static double to_unit(std::uint64_t w) {
    // (0,1): shift into 53 bits and offset by half an ulp.
    return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t seed_;
};

}  // namespace distflow
