#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gld {

// splitmix64 finalizer; used to derive named sub-streams from one seed.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Child seed named by a path of integers. Every random decision in the
// toolkit draws from a stream derived this way, so results do not depend on
// evaluation order or thread count.
template <typename... Parts>
constexpr std::uint64_t derive_seed(std::uint64_t seed, Parts... parts) {
  std::uint64_t h = mix64(seed ^ 0x5851f42d4c957f2dULL);
  ((h = mix64(h ^ mix64(static_cast<std::uint64_t>(parts)))), ...);
  return h;
}

// mt19937_64 wrapper with hand-rolled draws. Standard <random> distributions
// are implementation-defined; these are bit-stable everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1) with 53-bit resolution
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
  }

  // unbiased integer in [0, n)
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  std::size_t next_index(std::size_t n) {
    return static_cast<std::size_t>(next_below(n));
  }

 private:
  std::mt19937_64 engine_;
};

template <typename T>
void shuffle_in_place(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.next_index(i)]);
  }
}

}  // namespace gld
