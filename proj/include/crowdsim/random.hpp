#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace crowdsim {

// SplitMix64 finalizer. Used as a counter-based generator: the value drawn is
// a pure function of (key, counter), so streams can be addressed in any order
// from any thread.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ mix64(b + 0x632be59bd9b4e019ULL));
}

/// Deterministic stream keyed by a 64-bit value. Output is independent of the
/// standard library implementation, which keeps traces portable.
class CounterRng {
 public:
  constexpr explicit CounterRng(std::uint64_t key) : key_(key) {}

  constexpr std::uint64_t next_u64() { return hash_combine(key_, counter_++); }

  /// Uniform in [0, 1) with 53 random bits.
  constexpr double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  constexpr double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  /// Uniform integer in [0, bound). Lemire's multiply-shift, slightly biased
  /// for huge bounds, which is irrelevant for shuffling constraint lists.
  constexpr std::size_t below(std::size_t bound) {
    const unsigned __int128 product =
        static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(bound);
    return static_cast<std::size_t>(product >> 64);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Fisher-Yates over an index permutation.
template <typename T>
constexpr void shuffle(std::span<T> items, CounterRng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace crowdsim
