#pragma once

/**
 * Jittered kd-tree stratification of the unit hypercube.
 *
 * The n-way partition is a binary tree that splits axes round-robin starting
 * at axis 0. A node holding N strata gives ceil(N/2) of them to its lower
 * child, with the split plane at fraction ceil(N/2)/N of the node's extent.
 * Leaf i is reached by reading the bits of i least-significant first
 * (0 = lower child, 1 = upper child), so any single cell can be computed in
 * O(log n) without building the tree.
 */

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kdstrat/counter_rng.hpp"
#include "kdstrat/error.hpp"
#include "kdstrat/parallel.hpp"
#include "kdstrat/sample_set.hpp"

namespace kdstrat {

/// Axis-aligned box [lower, upper). Real is double in production; the exact
/// rational instantiation is used for printing fractions.
template <class Real>
struct BasicCellBounds {
  std::vector<Real> lower;
  std::vector<Real> upper;

  std::size_t dimension() const noexcept { return lower.size(); }

  Real volume() const {
    Real v = Real(1);
    for (std::size_t m = 0; m < lower.size(); ++m) v *= upper[m] - lower[m];
    return v;
  }

  /// Half-open membership; a face lying on the domain boundary 1 is closed.
  bool contains(std::span<const double> x) const {
    for (std::size_t m = 0; m < lower.size(); ++m) {
      if (x[m] < lower[m]) return false;
      if (upper[m] == Real(1) ? x[m] > upper[m] : x[m] >= upper[m]) return false;
    }
    return true;
  }

  friend bool operator==(const BasicCellBounds&, const BasicCellBounds&) = default;
};

using CellBounds = BasicCellBounds<double>;

struct PartitionParams {
  std::uint64_t n = 1;
  std::size_t d = 1;
  std::uint64_t i = 0;
};

namespace detail {

inline void check_shape(std::uint64_t n, std::size_t d) {
  if (n == 0) throw InvalidArgument("stratum count n must be positive");
  if (d == 0) throw InvalidArgument("dimension d must be positive");
}

inline void check_params(const PartitionParams& p) {
  check_shape(p.n, p.d);
  if (p.i >= p.n)
    throw InvalidArgument("stratum index " + std::to_string(p.i) + " out of range for n = " + std::to_string(p.n));
}

/// Split plane of [lower, upper) for a node with `count` strata. Both the
/// direct and the recursive routes go through here so shared faces agree bitwise.
template <class Real>
Real split_plane(const Real& lower, const Real& upper, std::uint64_t count) {
  const std::uint64_t lower_share = (count + 1) / 2;
  return (upper - lower) * Real(lower_share) / Real(count) + lower;
}

template <class Real>
void bounds_into(const PartitionParams& p, std::span<Real> lower, std::span<Real> upper) {
  for (std::size_t m = 0; m < p.d; ++m) {
    lower[m] = Real(0);
    upper[m] = Real(1);
  }
  std::uint64_t remaining = p.n;
  std::uint64_t bits = p.i;
  std::size_t axis = 0;
  while (remaining > 1) {
    const std::uint64_t lower_share = (remaining + 1) / 2;
    const Real plane = split_plane(lower[axis], upper[axis], remaining);
    if ((bits & 1u) == 0) {
      upper[axis] = plane;
      remaining = lower_share;
    } else {
      lower[axis] = plane;
      remaining -= lower_share;
    }
    bits >>= 1;
    axis = axis + 1 == p.d ? 0 : axis + 1;
  }
}

inline void recurse_bounds(std::vector<double>& lower, std::vector<double>& upper, std::uint64_t count,
                           std::size_t axis, std::uint64_t prefix, unsigned depth, std::vector<CellBounds>& out) {
  if (count == 1) {
    out[prefix] = CellBounds{lower, upper};
    return;
  }
  const std::size_t next_axis = axis + 1 == lower.size() ? 0 : axis + 1;
  const std::uint64_t lower_share = (count + 1) / 2;
  const double plane = split_plane(lower[axis], upper[axis], count);

  const double saved_upper = upper[axis];
  upper[axis] = plane;
  recurse_bounds(lower, upper, lower_share, next_axis, prefix, depth + 1, out);
  upper[axis] = saved_upper;

  const double saved_lower = lower[axis];
  lower[axis] = plane;
  recurse_bounds(lower, upper, count - lower_share, next_axis, prefix | (std::uint64_t{1} << depth), depth + 1, out);
  lower[axis] = saved_lower;
}

/// Maps u in [0,1) into [lo, hi), guarding against rounding onto hi.
inline double jitter_into(double lo, double hi, double u) noexcept {
  double x = lo + (hi - lo) * u;
  if (x >= hi) x = std::nextafter(hi, lo);
  if (x < lo) x = lo;
  return x;
}

}  // namespace detail

/// Bounds of stratum p.i in the p.n-way partition, in O(log n).
template <class Real = double>
BasicCellBounds<Real> calculate_bounds_as(const PartitionParams& p) {
  detail::check_params(p);
  BasicCellBounds<Real> cell{std::vector<Real>(p.d), std::vector<Real>(p.d)};
  detail::bounds_into<Real>(p, cell.lower, cell.upper);
  return cell;
}

inline CellBounds calculate_bounds(const PartitionParams& p) { return calculate_bounds_as<double>(p); }

/// Allocation-free variant for hot loops; spans must hold p.d entries.
inline void calculate_bounds(const PartitionParams& p, std::span<double> lower, std::span<double> upper) {
  detail::check_params(p);
  if (lower.size() < p.d || upper.size() < p.d) throw InvalidArgument("output spans shorter than d");
  detail::bounds_into<double>(p, lower, upper);
}

/// All n cells in index order by one O(n) traversal of the tree.
inline std::vector<CellBounds> calculate_all_bounds(std::uint64_t n, std::size_t d) {
  detail::check_shape(n, d);
  std::vector<CellBounds> cells(n);
  std::vector<double> lower(d, 0.0);
  std::vector<double> upper(d, 1.0);
  detail::recurse_bounds(lower, upper, n, 0, 0, 0, cells);
  return cells;
}

/// Coordinate m of the returned point uses only (master_seed, sample_index, m).
inline void jitter(const CellBounds& bounds, std::uint64_t master_seed, std::uint64_t sample_index,
                   std::span<double> out) {
  for (std::size_t m = 0; m < bounds.dimension(); ++m) {
    const double u = uniform(JitterKey{master_seed, sample_index, m});
    out[m] = detail::jitter_into(bounds.lower[m], bounds.upper[m], u);
  }
}

inline std::vector<double> jitter(const CellBounds& bounds, const JitterKey& key) {
  std::vector<double> point(bounds.dimension());
  jitter(bounds, key.master_seed, key.sample_index, point);
  return point;
}

/// Sample i of the jittered kd-tree set, computed independently of all others.
inline void kdt_point(std::uint64_t n, std::size_t d, std::uint64_t i, std::uint64_t master_seed,
                      std::span<double> out) {
  std::vector<double> lower(d);
  std::vector<double> upper(d);
  calculate_bounds(PartitionParams{n, d, i}, lower, upper);
  for (std::size_t m = 0; m < d; ++m)
    out[m] = detail::jitter_into(lower[m], upper[m], uniform(JitterKey{master_seed, i, m}));
}

/// Full jittered kd-tree set. Point i depends only on (n, d, i, master_seed),
/// so the result is identical for any thread count.
inline SampleSet generate_kdt_set(std::uint64_t n, std::size_t d, std::uint64_t master_seed, unsigned threads = 1) {
  detail::check_shape(n, d);
  SampleSet set(n, d, SamplerSpec{SamplerKind::kdt, Randomization::none, master_seed});
  parallel_for(n, threads, [&](std::size_t i) { kdt_point(n, d, i, master_seed, set.point(i)); });
  return set;
}

}  // namespace kdstrat
