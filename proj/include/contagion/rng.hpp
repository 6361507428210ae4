#pragma once

#include <cstdint>
#include <random>

namespace contagion {

/// splitmix64 step. Used both as a seed scrambler and as the documented
/// seed-splitting rule for ensemble replicates.
inline std::uint64_t splitmix64(std::uint64_t state) {
  std::uint64_t z = state + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Child seed for work item `index` under `master`. The rule is fixed:
/// child = splitmix64(master + (index + 1) * golden_gamma). Replicate k of a
/// run therefore always sees the same stream, independent of thread count.
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + (index + 1) * 0x9e3779b97f4a7c15ULL);
}

/// mt19937_64 wrapper with byte-stable draw helpers. std::uniform_*
/// distributions are implementation-defined; these are not, so a seed pins
/// the generated graph on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  /// Uniform integer in [0, n). Rejection sampling on the top range keeps
  /// the draw exactly uniform.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform_double() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform_double() < p; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace contagion
