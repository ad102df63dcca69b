// Deterministic random numbers for experiments and sampling.
//
// The variate recipes are spelled out here instead of using the <random>
// distribution classes on purpose: distribution output sequences are
// implementation-defined, and the report format promises byte-identical
// replay for a given seed regardless of the standard library build.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qbinclass {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stable per-trial seed stream: trial i of a run with root seed s uses
// derive_seed(s, i). Nested stages derive again from the result.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  return splitmix64(root ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  // Uniform on (0, 1]; never 0, so logarithms are safe.
  double uniform() { return (double((gen_() >> 11)) + 1.0) * 0x1.0p-53; }

  // Uniform on [0, 1).
  double uniform01() { return double(gen_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller, one spare cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Uniform integer in [0, n) by rejection, bias-free.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

} // namespace qbinclass
