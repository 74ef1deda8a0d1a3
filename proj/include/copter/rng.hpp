#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace copter {

// Stateless seed mixing (splitmix64). Used to derive independent child
// streams from a master seed so that concurrent consumers stay reproducible.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a) {
  return splitmix64(base ^ splitmix64(a));
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                    std::uint64_t b) {
  return derive_seed(derive_seed(base, a), b);
}

// Deterministic random stream. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; all distributions are implemented here
// rather than with std::*_distribution (whose mappings are
// implementation-defined), so results are identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi], inclusive. Rejection sampling, no modulo
  // bias.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t n = static_cast<std::uint64_t>(hi - lo) + 1;
    if (n == 0) return static_cast<std::int64_t>(next_u64());  // full range
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return lo + static_cast<std::int64_t>(v % n);
  }

  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(n) - 1));
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller without caching: every call consumes exactly two uniforms,
  // so draw counts per consumer are fixed.
  double normal(double mean, double sd) {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double z = std::sqrt(-2.0 * std::log(u1)) *
                     std::cos(2.0 * 3.14159265358979323846 * u2);
    return mean + sd * z;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace copter
