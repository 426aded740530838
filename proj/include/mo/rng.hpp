#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace mo {

// Deterministic uniform draws: mt19937_64 (its sequence is pinned by the
// standard) with an explicit bits-to-double mapping. We never use
// std::uniform_real_distribution, whose output is implementation-defined,
// so seeded runs replay byte-identically across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform01() { return double(eng_() >> 11) * 0x1.0p-53; }       // [0, 1)
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }
  double symmetric() { return 2.0 * uniform01() - 1.0; }                 // [-1, 1)

  std::uint64_t integer(std::uint64_t n) {                               // [0, n)
    if (n == 0) throw std::invalid_argument("Rng::integer: empty range");
    return eng_() % n;
  }

  // splitmix64 step; derives independent-looking substream seeds.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace mo
