// Reproducible random streams.
//
// std::mt19937_64 has a bit-exact definition in the standard, but the
// std::*_distribution adaptors do not, so the conversions to doubles and
// bounded integers are written out here.
#pragma once

#include <cstdint>
#include <random>

namespace hwsn {

enum class RngStream : std::uint64_t {
  Deployment = 1,
  Election = 2,
};

class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, RngStream stream) : engine_(derive_seed(seed, stream)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer on [0, n), n > 0, by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

  static std::uint64_t derive_seed(std::uint64_t seed, RngStream stream) {
    // splitmix64 finalizer over seed and stream tag
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(stream) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hwsn
