#ifndef NGBMP_RNG_HPP
#define NGBMP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "ngbmp/types.hpp"

namespace ngbmp {

// splitmix64 finalizer; the basis of the seed-splitting rule below.
inline uint64_t splitmix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Deterministic sub-seed for an indexed stream (trial, grid point, purpose).
// Chaining mix_seed calls gives every parallel work item its own stream while
// keeping the whole run a pure function of the master seed.
inline uint64_t mix_seed(uint64_t master, uint64_t stream) {
  return splitmix64(master ^ (0x9e3779b97f4a7c15ull + stream * 0xbf58476d1ce4e5b9ull));
}

// Seeded generator producing uniform, Gaussian, and circular complex Gaussian
// draws. Gaussians use Box-Muller on raw 53-bit uniforms so that the value
// stream depends only on the seed, not on the standard library in use.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal N(0, 1).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  // Circular complex Gaussian with E|z|^2 = 1 (each component N(0, 1/2)).
  Complex cgaussian() {
    const double s = std::numbers::sqrt2;
    return Complex(gaussian() / s, gaussian() / s);
  }

  // Bernoulli with success probability p.
  bool bernoulli(double p) { return uniform() < p; }

  uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ngbmp

#endif  // NGBMP_RNG_HPP
