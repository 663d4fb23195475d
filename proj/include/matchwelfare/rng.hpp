#pragma once
// Seeded 64-bit PRNG used by every randomized routine in the library.
// splitmix64 is tiny, splittable (child streams by seed derivation), and has
// published statistical quality (passes BigCrush as the seeding stage of
// xoshiro); the standard library offers no splittable or counter-based
// generator, and bit-for-bit reproducibility across platforms matters more
// here than period length.  The generator name is recorded alongside seeds in
// every Monte-Carlo result.

#include <cstdint>
#include <vector>

namespace matchwelfare {

inline constexpr const char* kRngName = "splitmix64";

class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  std::uint64_t operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Independent child stream (per-trial / per-chunk seeds).
  SplitMix64 split() { return SplitMix64(operator()()); }

  // Unbiased draw from {0, ..., bound-1} by rejection from the top.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = operator()();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform double in [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(operator()() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::uint64_t state_;
};

// In-place Fisher-Yates; spelled out (rather than std::shuffle) so shuffles
// are identical on every standard library implementation.
template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.below(i)]);
  }
}

}  // namespace matchwelfare
