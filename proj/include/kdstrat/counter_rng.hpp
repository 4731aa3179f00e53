#pragma once

// Stateless counter-based random numbers. Every value is a pure function of
// its key, so points can be produced in any order or on any thread.

#include <cstdint>
#include <string_view>

namespace kdstrat {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_pair(std::uint64_t key, std::uint64_t value) noexcept {
  return mix64(mix64(key + 0x9e3779b97f4a7c15ULL) ^ (value * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
}

/// FNV-1a, used to turn string tags and ids into seed material.
constexpr std::uint64_t hash_string(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t seed) noexcept { return seed; }

template <class... Rest>
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t part, Rest... rest) noexcept {
  return derive_seed(hash_pair(seed, part), static_cast<std::uint64_t>(rest)...);
}

/// Uniform double in [0,1) from the top 53 bits.
constexpr double to_unit_double(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Identifies one jitter value: coordinate `axis` of sample `sample_index`.
struct JitterKey {
  std::uint64_t master_seed = 0;
  std::uint64_t sample_index = 0;
  std::uint64_t axis = 0;
};

constexpr double uniform(const JitterKey& key) noexcept {
  return to_unit_double(hash_pair(hash_pair(key.master_seed, key.sample_index), key.axis));
}

/// Sequential draws from a keyed counter. Copyable; the stream position is the only state.
class CounterStream {
 public:
  constexpr explicit CounterStream(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t next_u64() noexcept { return hash_pair(key_, counter_++); }
  constexpr double next_double() noexcept { return to_unit_double(next_u64()); }

  /// Unbiased integer in [0, bound) by Lemire's multiply-and-reject.
  std::uint64_t next_below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace kdstrat
