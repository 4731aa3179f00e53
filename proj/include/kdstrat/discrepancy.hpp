#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kdstrat/counter_rng.hpp"
#include "kdstrat/error.hpp"
#include "kdstrat/parallel.hpp"
#include "kdstrat/sample_set.hpp"
#include "kdstrat/samplers.hpp"

namespace kdstrat {

/// Neumaier's compensated summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      compensation_ += (sum_ - t) + x;
    else
      compensation_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

enum class DiscrepancyKind { l2_star, linf_star_exact, theorem1_bound };

constexpr std::string_view to_string(DiscrepancyKind kind) noexcept {
  switch (kind) {
    case DiscrepancyKind::l2_star:
      return "l2_star";
    case DiscrepancyKind::linf_star_exact:
      return "linf_star_exact";
    case DiscrepancyKind::theorem1_bound:
      return "theorem1_bound";
  }
  return "unknown";
}

struct DiscrepancyResult {
  double value = 0.0;
  DiscrepancyKind kind = DiscrepancyKind::l2_star;
  std::size_t n = 0;
  std::size_t d = 0;
};

/// Squared L2 star discrepancy by Warnock's closed form, O(n^2 d).
/// Rows of the pair sum are independent; each row is reduced with compensated
/// summation and rows are combined in index order, so the value does not
/// depend on `threads`.
inline double l2_star_discrepancy_squared(const SampleSet& set, unsigned threads = 1) {
  const std::size_t n = set.size();
  const std::size_t d = set.dimension();
  if (n == 0) throw InvalidArgument("discrepancy of an empty set");

  std::vector<double> row_sums(n);
  std::vector<double> single_terms(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto xi = set.point(i);
    double single = 1.0;
    for (std::size_t m = 0; m < d; ++m) single *= 1.0 - xi[m] * xi[m];
    single_terms[i] = single;

    // Diagonal once plus twice the strict upper triangle.
    CompensatedSum row;
    double diag = 1.0;
    for (std::size_t m = 0; m < d; ++m) diag *= 1.0 - xi[m];
    row.add(diag);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto xj = set.point(j);
      double prod = 1.0;
      for (std::size_t m = 0; m < d; ++m) prod *= 1.0 - std::max(xi[m], xj[m]);
      row.add(2.0 * prod);
    }
    row_sums[i] = row.value();
  });

  CompensatedSum pairs;
  CompensatedSum singles;
  for (std::size_t i = 0; i < n; ++i) {
    pairs.add(row_sums[i]);
    singles.add(single_terms[i]);
  }
  const double nd = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  CompensatedSum total;
  total.add(std::pow(3.0, -dd));
  total.add(-std::pow(2.0, 1.0 - dd) / nd * singles.value());
  total.add(pairs.value() / (nd * nd));
  return std::max(0.0, total.value());
}

inline double l2_star_discrepancy(const SampleSet& set, unsigned threads = 1) {
  return std::sqrt(l2_star_discrepancy_squared(set, threads));
}

inline constexpr std::size_t kLinfMaxPoints = 512;
inline constexpr std::size_t kLinfMaxDimension = 3;

namespace detail {

/// Sweeps every grid corner built from per-axis thresholds and returns the
/// largest signed discrepancy. `ranks[i][a]` is the smallest threshold index
/// at which point i counts on axis a (or thresholds.size() if never).
/// closed = true maximizes count/n - vol, otherwise vol - count/n.
inline double corner_sweep(const std::array<std::vector<double>, 3>& thresholds,
                           const std::vector<std::array<std::size_t, 3>>& ranks, bool closed) {
  const std::size_t p0 = thresholds[0].size();
  const std::size_t p1 = thresholds[1].size();
  const std::size_t p2 = thresholds[2].size();
  const double n = static_cast<double>(ranks.size());

  std::vector<std::vector<std::size_t>> by_level(p2);
  for (std::size_t i = 0; i < ranks.size(); ++i)
    if (ranks[i][0] < p0 && ranks[i][1] < p1 && ranks[i][2] < p2) by_level[ranks[i][2]].push_back(i);

  // counts[a * p1 + b]: points with rank0 <= a, rank1 <= b, rank2 <= current level.
  std::vector<std::uint32_t> counts(p0 * p1, 0);
  double worst = 0.0;
  for (std::size_t c = 0; c < p2; ++c) {
    for (std::size_t i : by_level[c])
      for (std::size_t a = ranks[i][0]; a < p0; ++a)
        for (std::size_t b = ranks[i][1]; b < p1; ++b) ++counts[a * p1 + b];
    const double z = thresholds[2][c];
    for (std::size_t a = 0; a < p0; ++a) {
      const double xz = thresholds[0][a] * z;
      for (std::size_t b = 0; b < p1; ++b) {
        const double vol = xz * thresholds[1][b];
        const double frac = counts[a * p1 + b] / n;
        worst = std::max(worst, closed ? frac - vol : vol - frac);
      }
    }
  }
  return worst;
}

}  // namespace detail

/// Exact L-infinity star discrepancy for small sets (n <= 512, d <= 3).
/// Critical boxes have upper corners on the grid of sample coordinates plus 1;
/// each corner is evaluated with the closed count (box [0,y]) and the open
/// count (box [0,y)), which together attain the supremum.
inline double linf_star_discrepancy_exact(const SampleSet& set) {
  const std::size_t n = set.size();
  const std::size_t d = set.dimension();
  if (n == 0) throw InvalidArgument("discrepancy of an empty set");
  if (n > kLinfMaxPoints || d > kLinfMaxDimension)
    throw InvalidArgument("exact L-infinity discrepancy limited to n <= 512 and d <= 3 (got n = " +
                          std::to_string(n) + ", d = " + std::to_string(d) + ")");

  // Axes beyond d get the single threshold 1 and never constrain a point.
  std::array<std::vector<double>, 3> thresholds;
  for (std::size_t a = 0; a < 3; ++a) {
    auto& t = thresholds[a];
    t.push_back(1.0);
    if (a < d)
      for (std::size_t i = 0; i < n; ++i) t.push_back(set(i, a));
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
  }

  std::vector<std::array<std::size_t, 3>> closed_ranks(n);
  std::vector<std::array<std::size_t, 3>> open_ranks(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < 3; ++a) {
      const auto& t = thresholds[a];
      if (a >= d) {
        closed_ranks[i][a] = open_ranks[i][a] = 0;
        continue;
      }
      const double x = set(i, a);
      // x <= t[r] first holds at lower_bound; x < t[r] first holds at upper_bound.
      closed_ranks[i][a] = static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), x) - t.begin());
      open_ranks[i][a] = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), x) - t.begin());
    }
  }
  return std::max(detail::corner_sweep(thresholds, closed_ranks, true),
                  detail::corner_sweep(thresholds, open_ranks, false));
}

/// Worst-case star discrepancy bound 2^(d-1) d n^(-1/d) for jittered kd-tree sets.
inline double theorem1_bound(std::uint64_t n, std::size_t d) {
  if (n == 0 || d == 0) throw InvalidArgument("bound requires n >= 1 and d >= 1");
  const double dd = static_cast<double>(d);
  return std::ldexp(dd, static_cast<int>(d) - 1) * std::pow(static_cast<double>(n), -1.0 / dd);
}

struct MeanDiscrepancy {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
  std::size_t reps = 0;
};

/// Seed of realization `rep` in a repeated experiment.
constexpr std::uint64_t realization_seed(std::uint64_t seed, std::uint64_t rep) noexcept {
  return derive_seed(seed, hash_string("realization"), rep);
}

/// Mean L2 star discrepancy over `reps` independent realizations of `spec`.
/// QMC kinds are always shift-randomized so realizations differ.
inline MeanDiscrepancy mean_l2_discrepancy(SamplerSpec spec, std::uint64_t n, std::size_t d, std::size_t reps,
                                           std::uint64_t seed, unsigned threads = 1) {
  if (reps == 0) throw InvalidArgument("reps must be at least 1");
  if (is_qmc(spec.kind)) spec.randomization = Randomization::shift;
  std::vector<double> values(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    SamplerSpec realization = spec;
    realization.master_seed = realization_seed(seed, r);
    values[r] = l2_star_discrepancy(generate(realization, n, d));
  });
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  MeanDiscrepancy out;
  out.reps = reps;
  out.mean = sum.value() / static_cast<double>(reps);
  if (reps > 1) {
    CompensatedSum sq;
    for (double v : values) sq.add((v - out.mean) * (v - out.mean));
    out.stderr_of_mean = std::sqrt(sq.value() / static_cast<double>(reps - 1) / static_cast<double>(reps));
  }
  return out;
}

}  // namespace kdstrat
