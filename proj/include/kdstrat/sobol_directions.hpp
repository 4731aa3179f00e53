#pragma once

// Sobol direction numbers, 32-bit, for the first 16 dimensions.
// Primitive polynomials and initial m_k are the Joe-Kuo "new-joe-kuo-6"
// entries for dimensions 2..16; dimension 1 is the van der Corput sequence.

#include <array>
#include <cstdint>

namespace kdstrat::sobol {

inline constexpr std::size_t kMaxDimension = 16;
inline constexpr unsigned kBits = 32;

struct Polynomial {
  unsigned degree;
  std::uint32_t coefficients;  // interior coefficients a_1..a_{s-1}, a_1 most significant
  std::array<std::uint32_t, 8> initial;
};

inline constexpr std::array<Polynomial, kMaxDimension - 1> kPolynomials{{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
}};

using DirectionTable = std::array<std::array<std::uint32_t, kBits>, kMaxDimension>;

constexpr DirectionTable make_directions() {
  DirectionTable v{};
  for (unsigned k = 0; k < kBits; ++k) v[0][k] = std::uint32_t{1} << (kBits - 1 - k);
  for (std::size_t dim = 1; dim < kMaxDimension; ++dim) {
    const Polynomial& poly = kPolynomials[dim - 1];
    const unsigned s = poly.degree;
    for (unsigned k = 0; k < s; ++k) v[dim][k] = poly.initial[k] << (kBits - 1 - k);
    for (unsigned k = s; k < kBits; ++k) {
      std::uint32_t value = v[dim][k - s] ^ (v[dim][k - s] >> s);
      for (unsigned j = 1; j < s; ++j)
        if ((poly.coefficients >> (s - 1 - j)) & 1u) value ^= v[dim][k - j];
      v[dim][k] = value;
    }
  }
  return v;
}

inline constexpr DirectionTable kDirections = make_directions();

}  // namespace kdstrat::sobol
