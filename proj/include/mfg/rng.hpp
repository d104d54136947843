#pragma once

#include <cmath>
#include <cstdint>

namespace mfg {

// Counter-based splittable generator (splitmix64 core). Every stream is a
// pure function of (seed, split tags, draw counter), so check batteries are
// reproducible across platforms and can be sharded without coordination.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(mix(seed ^ 0x9e3779b97f4a7c15ull)) {}

  Rng split(uint64_t tag) const { return Rng(mix(state_ ^ mix(tag + 0x94d049bb133111ebull))); }

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // Uniform in [0,1) with 53-bit resolution.
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  double log_uniform(double lo, double hi) {
    return lo * std::exp(next_double() * std::log(hi / lo));
  }

  int next_int(int n) { return static_cast<int>(next_u64() % static_cast<uint64_t>(n)); }

 private:
  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  uint64_t state_;
};

}  // namespace mfg
