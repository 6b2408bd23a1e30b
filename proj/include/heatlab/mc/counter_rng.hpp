#pragma once

#include <cmath>
#include <cstdint>

namespace heatlab {

/// Counter-based generator: every draw is a pure function of
/// (seed, path, step, slot), so ensembles are reproducible bit-for-bit and
/// can be evaluated in any order. Mixing is chained splitmix64 finalizers.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t raw(std::uint64_t path, std::uint64_t step, std::uint64_t slot) const {
    std::uint64_t h = mix(seed_ ^ 0x8BADF00D5EEDULL);
    h = mix(h ^ (path * 0x9E3779B97F4A7C15ULL));
    h = mix(h ^ (step * 0xD1B54A32D192ED03ULL));
    h = mix(h ^ (slot * 0x94D049BB133111EBULL));
    return h;
  }

  /// Uniform draw in the open interval (0, 1).
  double uniform(std::uint64_t path, std::uint64_t step, std::uint64_t slot) const {
    return (static_cast<double>(raw(path, step, slot) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal pair via Box-Muller; slot indexes the pair.
  void normal_pair(std::uint64_t path, std::uint64_t step, std::uint64_t slot, double& z0,
                   double& z1) const {
    const double u1 = uniform(path, step, 2 * slot);
    const double u2 = uniform(path, step, 2 * slot + 1);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    z0 = radius * std::cos(angle);
    z1 = radius * std::sin(angle);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
};

}  // namespace heatlab
