#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace lcra {

// Deterministic random stream. Independent streams for (seed, a, b) tuples are
// obtained through derive(), which hashes the tuple into a fresh engine seed so
// that trial results do not depend on scheduling or worker count.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  static RandomStream derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = mix(seed ^ 0x243f6a8885a308d3ull);
    s = mix(s + 0x9e3779b97f4a7c15ull * (a + 1));
    s = mix(s + 0xd1b54a32d192ed03ull * (b + 1));
    return RandomStream(s);
  }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double gauss() { return normal_(engine_); }

  // CN(0, variance): independent real and imaginary parts, variance/2 each.
  std::complex<double> cgauss(double variance) {
    const double s = std::sqrt(0.5 * variance);
    const double re = gauss();
    const double im = gauss();
    return {s * re, s * im};
  }

  bool bernoulli(double p) { return uniform() < p; }

  int binomial(int n, double p) {
    return std::binomial_distribution<int>(n, p)(engine_);
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  // splitmix64 finalizer, used as a stateless hash.
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace lcra
