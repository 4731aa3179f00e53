#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kdstrat/error.hpp"

namespace kdstrat {

enum class SamplerKind { random, jittered_grid, lhs, halton, sobol, kdt, kdt_2d_pad, jittered_2d_pad };

enum class Randomization { none, shift };

inline constexpr std::array<std::pair<SamplerKind, std::string_view>, 8> kSamplerNames{{
    {SamplerKind::random, "random"},
    {SamplerKind::jittered_grid, "jittered_grid"},
    {SamplerKind::lhs, "lhs"},
    {SamplerKind::halton, "halton"},
    {SamplerKind::sobol, "sobol"},
    {SamplerKind::kdt, "kdt"},
    {SamplerKind::kdt_2d_pad, "kdt_2d_pad"},
    {SamplerKind::jittered_2d_pad, "jittered_2d_pad"},
}};

constexpr std::string_view to_string(SamplerKind kind) noexcept {
  for (const auto& [k, name] : kSamplerNames)
    if (k == kind) return name;
  return "unknown";
}

inline SamplerKind parse_sampler_kind(std::string_view name) {
  for (const auto& [k, n] : kSamplerNames)
    if (n == name) return k;
  throw InvalidArgument("unknown sampler kind '" + std::string(name) + "'");
}

constexpr bool is_qmc(SamplerKind kind) noexcept { return kind == SamplerKind::halton || kind == SamplerKind::sobol; }

struct SamplerSpec {
  SamplerKind kind = SamplerKind::random;
  Randomization randomization = Randomization::none;
  std::uint64_t master_seed = 0;

  /// Stable identifier, e.g. "kdt" or "sobol+shift". Does not include the seed.
  std::string id() const {
    std::string s(to_string(kind));
    if (randomization == Randomization::shift) s += "+shift";
    return s;
  }

  /// Inverse of id().
  static SamplerSpec parse(std::string_view text, std::uint64_t seed = 0) {
    SamplerSpec spec;
    spec.master_seed = seed;
    if (const auto plus = text.find('+'); plus != std::string_view::npos) {
      if (text.substr(plus + 1) != "shift")
        throw InvalidArgument("unknown randomization '" + std::string(text.substr(plus + 1)) + "'");
      spec.randomization = Randomization::shift;
      text = text.substr(0, plus);
    }
    spec.kind = parse_sampler_kind(text);
    spec.validate();
    return spec;
  }

  void validate() const {
    if (randomization != Randomization::none && !is_qmc(kind))
      throw InvalidArgument("randomization applies to halton and sobol only, not " + std::string(to_string(kind)));
  }

  friend bool operator==(const SamplerSpec&, const SamplerSpec&) = default;
};

/// n points in [0,1)^d, stored row-major, with the spec that produced them.
class SampleSet {
 public:
  SampleSet() = default;
  SampleSet(std::size_t n, std::size_t d, SamplerSpec spec = {})
      : n_(n), d_(d), coords_(n * d, 0.0), spec_(spec) {}
  SampleSet(std::size_t n, std::size_t d, std::vector<double> coords, SamplerSpec spec = {})
      : n_(n), d_(d), coords_(std::move(coords)), spec_(spec) {
    if (coords_.size() != n * d) throw InvalidArgument("coordinate count does not match n * d");
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t dimension() const noexcept { return d_; }
  const SamplerSpec& spec() const noexcept { return spec_; }

  std::span<const double> point(std::size_t i) const noexcept { return {coords_.data() + i * d_, d_}; }
  std::span<double> point(std::size_t i) noexcept { return {coords_.data() + i * d_, d_}; }
  double operator()(std::size_t i, std::size_t m) const noexcept { return coords_[i * d_ + m]; }

  std::span<const double> coordinates() const noexcept { return coords_; }
  std::span<double> coordinates() noexcept { return coords_; }

  friend bool operator==(const SampleSet&, const SampleSet&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> coords_;
  SamplerSpec spec_;
};

}  // namespace kdstrat
