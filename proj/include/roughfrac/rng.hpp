#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace roughfrac {

// Seed derivation for independent substreams (SplitMix64 finalizer).
// Deterministic: the same (root, tag) pair always yields the same seed.
inline std::uint64_t mix_seed(std::uint64_t root, std::uint64_t tag) {
  std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic RNG. mt19937_64 has a bit-exact standardized engine; the
// distributions below are hand-rolled because the std:: distribution
// classes are implementation-defined and would break byte-identical
// reproducibility of reports.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Uniform over {0, 1, ..., hi - 1} by rejection (unbiased).
  std::uint64_t below(std::uint64_t hi) {
    const std::uint64_t lim = ~std::uint64_t{0} - ~std::uint64_t{0} % hi;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= lim);
    return x % hi;
  }

  bool coin() { return (engine_() >> 63) != 0; }

  double exponential() { return -std::log1p(-uniform()); }

  // Sum of k unit exponentials; Gamma(k,1) for the small integer shapes
  // needed by Dirichlet direction sampling.
  double gamma_int(int k) {
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += exponential();
    return s;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925286766559 * uniform();
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace roughfrac
