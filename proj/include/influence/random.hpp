#pragma once

#include <cstdint>
#include <random>

namespace influence {

/// Seedable, splittable random stream. Each child stream is seeded from
/// (parent seed, index) through SplitMix64, so replicas draw independent
/// sequences regardless of how they are scheduled.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_{seed}, engine_{mix(seed)} {}

  RandomStream split(std::uint64_t index) const {
    return RandomStream(mix(seed_ ^ mix(index + 0x632be59bd9b4e019ULL)));
  }

  std::uint64_t seed() const noexcept { return seed_; }

  /// Uniform on [0, 1) with 53 random bits; portable across standard
  /// libraries, unlike std::uniform_real_distribution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }

  static constexpr std::uint64_t mix(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace influence
