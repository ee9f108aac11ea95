#pragma once

#include <cstdint>
#include <string_view>

namespace fql {

// Deterministic, splittable random stream (xoshiro256++ seeded via splitmix64).
// Streams are derived from a root seed by integer labels, never from engine
// state, so adding or reordering consumers does not disturb sibling streams.
// Derivation labels used across the project:
//   learner:    (trial), (loop, phase), add_rc cell/trial/a/rep tuples
//   ldme:       phase-1 gamma index, (round, repeat) for instance rows
//   lbp:        instance generation, per-(row, column) binarization coins
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t z = seed;
    for (auto& w : state_) {
      z += 0x9e3779b97f4a7c15ULL;
      w = mix64_(z);
    }
  }

  std::uint64_t seed() const { return seed_; }

  // Child stream; deterministic function of (seed, label) only.
  Rng derive(std::uint64_t label) const {
    return Rng(mix64_(seed_ + 0x9e3779b97f4a7c15ULL * (label + 1)));
  }
  Rng derive(std::uint64_t a, std::uint64_t b) const { return derive(a).derive(b); }
  Rng derive(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
    return derive(a).derive(b).derive(c);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl_(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl_(state_[3], 45);
    return result;
  }

  // Uniform in [0, bound), bound >= 1. Lemire's method with rejection; exact.
  std::uint32_t uniform_u32(std::uint32_t bound) {
    std::uint64_t x = next_u64() >> 32;
    std::uint64_t m = x * bound;
    std::uint32_t l = static_cast<std::uint32_t>(m);
    if (l < bound) {
      std::uint32_t t = (0u - bound) % bound;
      while (l < t) {
        x = next_u64() >> 32;
        m = x * bound;
        l = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

  // Uniform in [0, 1).
  double uniform_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  bool coin(double p_heads) { return uniform_double() < p_heads; }

  // Stateless coin keyed by this stream's seed and a label pair; used where a
  // decision must be reproducible per (row, column) regardless of draw order.
  bool keyed_coin(std::uint64_t a, std::uint64_t b, double p_heads) const {
    std::uint64_t h = mix64_(seed_ ^ mix64_(a + 0x9e3779b97f4a7c15ULL * (b + 1)));
    return (h >> 11) * 0x1.0p-53 < p_heads;
  }

 private:
  static std::uint64_t rotl_(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

  static std::uint64_t mix64_(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t seed_;
  std::uint64_t state_[4];
};

}  // namespace fql
