#pragma once

// Point generators behind one interface: random, jittered grid, Latin
// hypercube, Halton, Sobol, jittered kd-tree, and the 2D-padded variants.
// Every sampler is a deterministic function of its SamplerSpec.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kdstrat/counter_rng.hpp"
#include "kdstrat/error.hpp"
#include "kdstrat/kdtree.hpp"
#include "kdstrat/parallel.hpp"
#include "kdstrat/sample_set.hpp"
#include "kdstrat/sobol_directions.hpp"

namespace kdstrat {

// ---------------------------------------------------------------------------
// Integer helpers

/// k with k^d == n, if one exists.
inline std::optional<std::uint64_t> exact_root(std::uint64_t n, std::size_t d) {
  if (n == 0 || d == 0) return std::nullopt;
  if (d == 1) return n;
  const auto pow_or_overflow = [d](std::uint64_t k) -> std::optional<std::uint64_t> {
    std::uint64_t p = 1;
    for (std::size_t j = 0; j < d; ++j) {
      if (k != 0 && p > std::numeric_limits<std::uint64_t>::max() / k) return std::nullopt;
      p *= k;
    }
    return p;
  };
  const auto guess = static_cast<std::uint64_t>(std::llround(std::pow(static_cast<double>(n), 1.0 / double(d))));
  for (std::uint64_t k = guess > 0 ? guess - 1 : 0; k <= guess + 1; ++k) {
    if (auto p = pow_or_overflow(k); p && *p == n) return k;
  }
  return std::nullopt;
}

/// First `count` primes.
inline std::vector<std::uint64_t> first_primes(std::size_t count) {
  std::vector<std::uint64_t> primes;
  primes.reserve(count);
  for (std::uint64_t candidate = 2; primes.size() < count; ++candidate) {
    bool prime = true;
    for (std::uint64_t p : primes) {
      if (p * p > candidate) break;
      if (candidate % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(candidate);
  }
  return primes;
}

/// Radical inverse of i in `base`. Exact digit reversal in integers followed
/// by a single division, so results are bit-reproducible.
inline double radical_inverse(std::uint64_t i, std::uint64_t base) {
  std::uint64_t reversed = 0;
  std::uint64_t denominator = 1;
  constexpr std::uint64_t kExactLimit = std::uint64_t{1} << 53;
  while (i > 0) {
    if (denominator > kExactLimit / base) {
      // Remaining digits are below double resolution; finish in floating point.
      double tail = 0.0;
      double scale = 1.0 / static_cast<double>(base);
      while (i > 0) {
        tail += static_cast<double>(i % base) * scale;
        scale /= static_cast<double>(base);
        i /= base;
      }
      return (static_cast<double>(reversed) + tail) / static_cast<double>(denominator);
    }
    reversed = reversed * base + i % base;
    denominator *= base;
    i /= base;
  }
  return static_cast<double>(reversed) / static_cast<double>(denominator);
}

// ---------------------------------------------------------------------------
// Per-index generators

inline void halton_point(std::uint64_t i, std::span<double> out) {
  const auto primes = first_primes(out.size());
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = radical_inverse(i, primes[m]);
}

inline std::vector<double> halton_point(std::uint64_t i, std::size_t d) {
  std::vector<double> x(d);
  halton_point(i, x);
  return x;
}

inline void check_sobol_dimension(std::size_t d) {
  if (d > sobol::kMaxDimension)
    throw InvalidArgument("sobol supports at most " + std::to_string(sobol::kMaxDimension) + " dimensions, got " +
                          std::to_string(d));
}

inline void sobol_point(std::uint64_t i, std::span<double> out) {
  check_sobol_dimension(out.size());
  if (i >> sobol::kBits) throw InvalidArgument("sobol index exceeds 2^32");
  for (std::size_t m = 0; m < out.size(); ++m) {
    std::uint32_t x = 0;
    std::uint64_t bits = i;
    for (unsigned k = 0; bits != 0; ++k, bits >>= 1)
      if (bits & 1u) x ^= sobol::kDirections[m][k];
    out[m] = static_cast<double>(x) * 0x1.0p-32;
  }
}

inline std::vector<double> sobol_point(std::uint64_t i, std::size_t d) {
  std::vector<double> x(d);
  sobol_point(i, x);
  return x;
}

// ---------------------------------------------------------------------------
// Whole-set generators

namespace detail {

inline void check_nd(std::uint64_t n, std::size_t d) {
  if (n == 0) throw InvalidArgument("sample count n must be positive");
  if (d == 0) throw InvalidArgument("dimension d must be positive");
}

/// Uniform random permutation of [0, n) by Fisher-Yates on a counter stream.
inline std::vector<std::uint64_t> random_permutation(std::uint64_t n, std::uint64_t key) {
  std::vector<std::uint64_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::uint64_t{0});
  CounterStream stream(key);
  for (std::uint64_t j = n; j > 1; --j) std::swap(perm[j - 1], perm[stream.next_below(j)]);
  return perm;
}

inline constexpr std::uint64_t kTagPermutation = hash_string("permutation");
inline constexpr std::uint64_t kTagShift = hash_string("shift");
inline constexpr std::uint64_t kTagPadBlock = hash_string("pad-block");
inline constexpr std::uint64_t kTagPadShuffle = hash_string("pad-shuffle");

}  // namespace detail

inline SampleSet random_set(std::uint64_t n, std::size_t d, std::uint64_t seed) {
  detail::check_nd(n, d);
  SampleSet set(n, d, SamplerSpec{SamplerKind::random, Randomization::none, seed});
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::size_t m = 0; m < d; ++m) set.point(i)[m] = uniform(JitterKey{seed, i, m});
  return set;
}

/// One jittered point per cell of the k^d grid; cell digits of i run axis 0 fastest.
inline SampleSet jittered_grid_set(std::uint64_t n, std::size_t d, std::uint64_t seed) {
  detail::check_nd(n, d);
  const auto k = exact_root(n, d);
  if (!k) throw InvalidArgument("jittered_grid: n must be a perfect d-th power (n = " + std::to_string(n) +
                                ", d = " + std::to_string(d) + ")");
  SampleSet set(n, d, SamplerSpec{SamplerKind::jittered_grid, Randomization::none, seed});
  const double kd = static_cast<double>(*k);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint64_t rest = i;
    for (std::size_t m = 0; m < d; ++m) {
      const auto digit = static_cast<double>(rest % *k);
      rest /= *k;
      set.point(i)[m] = kdstrat::detail::jitter_into(digit / kd, (digit + 1.0) / kd, uniform(JitterKey{seed, i, m}));
    }
  }
  return set;
}

/// Latin hypercube: on every axis the n points occupy the bins [j/n, (j+1)/n) once each.
inline SampleSet lhs_set(std::uint64_t n, std::size_t d, std::uint64_t seed) {
  detail::check_nd(n, d);
  SampleSet set(n, d, SamplerSpec{SamplerKind::lhs, Randomization::none, seed});
  const double nd = static_cast<double>(n);
  for (std::size_t m = 0; m < d; ++m) {
    const auto perm = detail::random_permutation(n, derive_seed(seed, detail::kTagPermutation, m));
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto bin = static_cast<double>(perm[i]);
      set.point(i)[m] = kdstrat::detail::jitter_into(bin / nd, (bin + 1.0) / nd, uniform(JitterKey{seed, i, m}));
    }
  }
  return set;
}

inline SampleSet halton_set(std::uint64_t n, std::size_t d) {
  detail::check_nd(n, d);
  SampleSet set(n, d, SamplerSpec{SamplerKind::halton});
  const auto primes = first_primes(d);
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::size_t m = 0; m < d; ++m) set.point(i)[m] = radical_inverse(i, primes[m]);
  return set;
}

inline SampleSet sobol_set(std::uint64_t n, std::size_t d) {
  detail::check_nd(n, d);
  check_sobol_dimension(d);
  SampleSet set(n, d, SamplerSpec{SamplerKind::sobol});
  for (std::uint64_t i = 0; i < n; ++i) sobol_point(i, set.point(i));
  return set;
}

/// Cranley-Patterson rotation by an explicit shift vector.
inline SampleSet randomize_shift(const SampleSet& set, std::span<const double> shift) {
  if (shift.size() != set.dimension()) throw InvalidArgument("shift vector dimension mismatch");
  SampleSet out = set;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto p = out.point(i);
    for (std::size_t m = 0; m < p.size(); ++m) {
      double x = p[m] + shift[m];
      if (x >= 1.0) x -= 1.0;
      p[m] = x;
    }
  }
  return out;
}

inline std::vector<double> shift_vector(std::size_t d, std::uint64_t seed) {
  std::vector<double> shift(d);
  const std::uint64_t key = derive_seed(seed, detail::kTagShift);
  for (std::size_t m = 0; m < d; ++m) shift[m] = uniform(JitterKey{key, 0, m});
  return shift;
}

/// Cranley-Patterson rotation by a shift drawn from `seed`.
inline SampleSet randomize_shift(const SampleSet& set, std::uint64_t seed) {
  return randomize_shift(set, shift_vector(set.dimension(), seed));
}

/// Pads 2D base sets across axis blocks (0,1), (2,3), ...; a trailing odd axis
/// gets a 1D set. Each block is generated and index-shuffled independently.
inline SampleSet pad_2d(SamplerKind base, std::uint64_t n, std::size_t d, std::uint64_t seed) {
  detail::check_nd(n, d);
  SamplerKind padded_kind;
  switch (base) {
    case SamplerKind::kdt:
      padded_kind = SamplerKind::kdt_2d_pad;
      break;
    case SamplerKind::jittered_grid:
      padded_kind = SamplerKind::jittered_2d_pad;
      if (d >= 2 && !exact_root(n, 2))
        throw InvalidArgument("jittered_2d_pad: n must be a perfect square (n = " + std::to_string(n) + ")");
      break;
    default:
      throw InvalidArgument("pad_2d supports kdt and jittered_grid bases, not " + std::string(to_string(base)));
  }

  SampleSet set(n, d, SamplerSpec{padded_kind, Randomization::none, seed});
  for (std::size_t first = 0, block = 0; first < d; first += 2, ++block) {
    const std::size_t width = std::min<std::size_t>(2, d - first);
    const std::uint64_t block_seed = derive_seed(seed, detail::kTagPadBlock, block);
    const SampleSet part = base == SamplerKind::kdt ? generate_kdt_set(n, width, block_seed)
                                                    : jittered_grid_set(n, width, block_seed);
    const auto perm = detail::random_permutation(n, derive_seed(seed, detail::kTagPadShuffle, block));
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto src = part.point(perm[i]);
      std::copy(src.begin(), src.end(), set.point(i).begin() + static_cast<std::ptrdiff_t>(first));
    }
  }
  return set;
}

/// Dispatches on spec.kind. QMC kinds with shift randomization are rotated by
/// a vector derived from spec.master_seed.
inline SampleSet generate(const SamplerSpec& spec, std::uint64_t n, std::size_t d, unsigned threads = 1) {
  spec.validate();
  detail::check_nd(n, d);
  SampleSet set;
  switch (spec.kind) {
    case SamplerKind::random:
      set = random_set(n, d, spec.master_seed);
      break;
    case SamplerKind::jittered_grid:
      set = jittered_grid_set(n, d, spec.master_seed);
      break;
    case SamplerKind::lhs:
      set = lhs_set(n, d, spec.master_seed);
      break;
    case SamplerKind::halton:
      set = halton_set(n, d);
      break;
    case SamplerKind::sobol:
      set = sobol_set(n, d);
      break;
    case SamplerKind::kdt:
      set = generate_kdt_set(n, d, spec.master_seed, threads);
      break;
    case SamplerKind::kdt_2d_pad:
      set = pad_2d(SamplerKind::kdt, n, d, spec.master_seed);
      break;
    case SamplerKind::jittered_2d_pad:
      set = pad_2d(SamplerKind::jittered_grid, n, d, spec.master_seed);
      break;
  }
  if (spec.randomization == Randomization::shift) set = randomize_shift(set, spec.master_seed);
  return SampleSet(n, d, std::vector<double>(set.coordinates().begin(), set.coordinates().end()), spec);
}

/// Whether `generate` accepts this (kind, n, d) combination.
inline bool accepts(SamplerKind kind, std::uint64_t n, std::size_t d) {
  if (n == 0 || d == 0) return false;
  switch (kind) {
    case SamplerKind::jittered_grid:
      return exact_root(n, d).has_value();
    case SamplerKind::jittered_2d_pad:
      return d < 2 || exact_root(n, 2).has_value();
    case SamplerKind::sobol:
      return d <= sobol::kMaxDimension;
    default:
      return true;
  }
}

}  // namespace kdstrat
