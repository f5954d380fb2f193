#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace laststep {

// splitmix64 finalizer (Steele, Lea, Flood 2014). Used both to whiten raw
// seeds before feeding the engine and to derive per-run streams from
// (seed0, run index) so that ensemble results never depend on scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed0, std::uint64_t index) {
  return splitmix64(splitmix64(seed0) ^ splitmix64(index));
}

// Deterministic random stream: std::mt19937_64 (bit-exact per the standard)
// plus hand-rolled output transforms, so draws are reproducible independent
// of any library's distribution internals.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : eng_(splitmix64(seed)) {}

  static RngStream for_run(std::uint64_t seed0, std::uint64_t index) {
    return RngStream(mix_seed(seed0, index));
  }

  std::uint64_t next_u64() { return eng_(); }

  // uniform in [0, 1), 53-bit resolution
  double next_unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Box-Muller; consumes exactly two uniforms per call
  double next_normal() {
    double u1 = 1.0 - next_unit();  // (0, 1], keeps log finite
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  double next_normal(double mean, double stddev) { return mean + stddev * next_normal(); }

  // uniform over {-1, +1}
  double next_rademacher() { return (eng_() >> 63) ? 1.0 : -1.0; }

  // uniform index in [0, n) via widening multiply
  std::size_t next_index(std::size_t n) {
    return static_cast<std::size_t>((static_cast<__uint128_t>(eng_()) * n) >> 64);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace laststep
