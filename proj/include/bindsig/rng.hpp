#pragma once

#include <cstdint>

namespace bindsig {

// Deterministic, platform-independent generator (splitmix64).
// std::uniform_int_distribution is not reproducible across standard
// libraries, so all randomness in the library goes through this.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform-ish value in [0, k). Modulo bias is irrelevant at the scales
  // used here (k is always tiny compared to 2^64).
  std::uint64_t below(std::uint64_t k) { return k == 0 ? 0 : next() % k; }

  int pick(int k) { return static_cast<int>(below(static_cast<std::uint64_t>(k))); }

  bool flip() { return (next() & 1) != 0; }

  // Independent stream for the idx-th sample of a run. Checks split their
  // seed per sample index, so failures replay in isolation.
  static Rng split(std::uint64_t seed, std::uint64_t idx) {
    Rng mix(seed ^ (0x632be59bd9b4e019ull * (idx + 1)));
    std::uint64_t derived = mix.next();
    return Rng(derived);
  }

 private:
  std::uint64_t state_;
};

}  // namespace bindsig
