#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace tokenwarp {

// Counter-based randomness: every stream is a pure function of the key it was
// built from, so parallel producers get identical bits regardless of thread
// count or evaluation order.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline uint64_t mix_keys(uint64_t a, uint64_t b) {
  return splitmix64(splitmix64(a) ^ (b + 0x9e3779b97f4a7c15ull));
}

class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : state_(splitmix64(seed)) {}
  CounterRng(uint64_t seed, uint64_t stream) : state_(mix_keys(seed, stream)) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be > 0.
  uint64_t bounded(uint64_t n) { return next_u64() % n; }

  // One Box-Muller draw producing two independent standard normals.
  std::pair<double, double> gaussian_pair() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
  }

 private:
  uint64_t state_;
};

}  // namespace tokenwarp
