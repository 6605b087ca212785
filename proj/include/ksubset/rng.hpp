#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace ksubset {

// Deterministic stream based on splitmix64 (Steele/Lea/Flood constants). A fixed,
// documented generator keeps seeded runs identical across platforms and compilers;
// std::normal_distribution and friends make no such guarantee.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1), top 53 bits of the state
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // standard normal via Box-Muller; always consumes exactly two uniforms (no caching,
  // so the draw count per call is fixed and streams stay alignable)
  double normal() {
    double u1 = uniform01();
    const double u2 = uniform01();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  uint64_t state_;
};

// Hash-combine for deriving per-trial seeds: fold b into a, then run one splitmix64
// step so related inputs land far apart.
inline uint64_t mix_seed(uint64_t a, uint64_t b) {
  RngStream s(a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2)));
  return s.next_u64();
}

// FNV-1a over a label, for turning estimator tags into seed material
inline uint64_t hash_tag(std::string_view tag) {
  uint64_t h = 1469598103934665603ull;
  for (char c : tag) {
    h ^= static_cast<uint8_t>(c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace ksubset
