#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <thread>
#include <vector>

#include "kdstrat/kdtree.hpp"
#include "kdstrat/samplers.hpp"
#include "oracles.hpp"

namespace kdstrat {
namespace {

using testing::Rational;

void ExpectBounds(const CellBounds& cell, std::vector<double> lower, std::vector<double> upper) {
  ASSERT_EQ(cell.dimension(), lower.size());
  for (std::size_t m = 0; m < lower.size(); ++m) {
    EXPECT_NEAR(cell.lower[m], lower[m], 1e-15) << "axis " << m;
    EXPECT_NEAR(cell.upper[m], upper[m], 1e-15) << "axis " << m;
  }
}

TEST(CalculateBounds, WorkedExampleTwelveStrata) {
  ExpectBounds(calculate_bounds({12, 2, 7}), {5.0 / 6.0, 0.5}, {1.0, 1.0});
}

TEST(CalculateBounds, WorkedExampleIsExactInRationals) {
  const auto cell = calculate_bounds_as<Rational>({12, 2, 7});
  EXPECT_EQ(cell.lower, (std::vector<Rational>{Rational(5, 6), Rational(1, 2)}));
  EXPECT_EQ(cell.upper, (std::vector<Rational>{Rational(1), Rational(1)}));
}

TEST(CalculateBounds, SingleStratumIsWholeCube) {
  ExpectBounds(calculate_bounds({1, 3, 0}), {0, 0, 0}, {1, 1, 1});
}

TEST(CalculateBounds, FiveStrataFirstSplitAtThreeFifths) {
  ExpectBounds(calculate_bounds({5, 3, 1}), {0.6, 0, 0}, {1, 0.5, 1});
  const auto oracle = testing::exact_partition(5, 3).at(1);
  EXPECT_EQ(oracle.lower, (std::vector<Rational>{Rational(3, 5), 0, 0}));
  EXPECT_EQ(oracle.upper, (std::vector<Rational>{1, Rational(1, 2), 1}));
}

TEST(CalculateBounds, SixteenStrataFirstCellIsGridCorner) {
  ExpectBounds(calculate_bounds({16, 2, 0}), {0, 0}, {0.25, 0.25});
}

TEST(CalculateBounds, RejectsInvalidParameters) {
  EXPECT_THROW(calculate_bounds({12, 2, 12}), InvalidArgument);
  EXPECT_THROW(calculate_bounds({0, 2, 0}), InvalidArgument);
  EXPECT_THROW(calculate_bounds({4, 0, 0}), InvalidArgument);
  EXPECT_THROW(calculate_all_bounds(0, 1), InvalidArgument);
  EXPECT_THROW(calculate_all_bounds(3, 0), InvalidArgument);
}

TEST(CalculateAllBounds, ThreeStrataInOneDimension) {
  const auto cells = calculate_all_bounds(3, 1);
  ASSERT_EQ(cells.size(), 3u);
  ExpectBounds(cells[0], {0}, {1.0 / 3.0});
  ExpectBounds(cells[1], {2.0 / 3.0}, {1});
  ExpectBounds(cells[2], {1.0 / 3.0}, {2.0 / 3.0});
}

TEST(CalculateAllBounds, FourStrataIsTwoByTwoGrid) {
  const auto cells = calculate_all_bounds(4, 2);
  std::set<std::pair<double, double>> corners;
  for (const auto& c : cells) {
    EXPECT_DOUBLE_EQ(c.upper[0] - c.lower[0], 0.5);
    EXPECT_DOUBLE_EQ(c.upper[1] - c.lower[1], 0.5);
    corners.insert({c.lower[0], c.lower[1]});
  }
  EXPECT_EQ(corners, (std::set<std::pair<double, double>>{{0, 0}, {0.5, 0}, {0, 0.5}, {0.5, 0.5}}));
}

TEST(CalculateAllBounds, TwelveStrataCellSeven) {
  ExpectBounds(calculate_all_bounds(12, 2)[7], {5.0 / 6.0, 0.5}, {1, 1});
}

// Both library routes against the exact top-down construction.
TEST(CalculateBounds, MatchesExactRecursiveOracle) {
  for (std::uint64_t n : {1u, 2u, 3u, 5u, 7u, 12u, 59u, 100u, 152u, 255u, 1000u, 4095u, 4096u}) {
    for (std::size_t d : {1u, 2u, 3u, 5u}) {
      const auto oracle = testing::exact_partition(n, d);
      ASSERT_EQ(oracle.size(), n);
      const auto all = calculate_all_bounds(n, d);
      for (const auto& [i, exact] : oracle) {
        ASSERT_LT(i, n);
        const auto direct = calculate_bounds({n, d, i});
        const auto rational = calculate_bounds_as<Rational>({n, d, i});
        EXPECT_EQ(rational.lower, exact.lower) << "n=" << n << " d=" << d << " i=" << i;
        EXPECT_EQ(rational.upper, exact.upper) << "n=" << n << " d=" << d << " i=" << i;
        for (std::size_t m = 0; m < d; ++m) {
          EXPECT_NEAR(direct.lower[m], exact.lower[m].convert_to<double>(), 1e-12);
          EXPECT_NEAR(direct.upper[m], exact.upper[m].convert_to<double>(), 1e-12);
          EXPECT_EQ(direct.lower[m], all[i].lower[m]);
          EXPECT_EQ(direct.upper[m], all[i].upper[m]);
        }
      }
    }
  }
}

TEST(CalculateAllBounds, VolumesAndBoundsAreValid) {
  for (std::uint64_t n = 1; n <= 200; ++n) {
    for (std::size_t d = 1; d <= 4; ++d) {
      double total = 0.0;
      for (const auto& c : calculate_all_bounds(n, d)) {
        for (std::size_t m = 0; m < d; ++m) {
          EXPECT_LE(0.0, c.lower[m]);
          EXPECT_LT(c.lower[m], c.upper[m]);
          EXPECT_LE(c.upper[m], 1.0);
        }
        EXPECT_NEAR(c.volume() * double(n), 1.0, 1e-9);
        total += c.volume();
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(Jitter, StaysInsideCellAndIsDeterministic) {
  const CellBounds cell{{5.0 / 6.0, 0.5}, {1.0, 1.0}};
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const JitterKey key{42, i, 0};
    const auto p = jitter(cell, key);
    EXPECT_GE(p[0], 5.0 / 6.0);
    EXPECT_LT(p[0], 1.0);
    EXPECT_GE(p[1], 0.5);
    EXPECT_LT(p[1], 1.0);
    EXPECT_EQ(p, jitter(cell, key));
  }
}

TEST(Jitter, UnitCubeGivesPointInHalfOpenCube) {
  const CellBounds cube{{0, 0, 0}, {1, 1, 1}};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    for (double x : jitter(cube, JitterKey{seed, 3, 0})) {
      EXPECT_GE(x, 0.0);
      EXPECT_LT(x, 1.0);
    }
  }
}

TEST(Jitter, CoordinateDependsOnlyOnItsKey) {
  const CellBounds a{{0, 0}, {1, 1}};
  const CellBounds b{{0, 0.25}, {1, 0.5}};
  const auto pa = jitter(a, JitterKey{9, 5, 0});
  const auto pb = jitter(b, JitterKey{9, 5, 0});
  EXPECT_EQ(pa[0], pb[0]);  // axis 0 has the same extent in both cells
  EXPECT_NE(jitter(a, JitterKey{9, 6, 0})[0], pa[0]);
  EXPECT_NE(jitter(a, JitterKey{10, 5, 0})[0], pa[0]);
}

TEST(Jitter, RoundingOntoUpperFaceIsExcluded) {
  EXPECT_LT(detail::jitter_into(0.1, 0.3, std::nextafter(1.0, 0.0)), 0.3);
  EXPECT_EQ(detail::jitter_into(0.25, 0.5, 0.0), 0.25);
}

TEST(GenerateKdtSet, PointSevenOfTwelveInWorkedCell) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto set = generate_kdt_set(12, 2, seed);
    EXPECT_GE(set(7, 0), 5.0 / 6.0);
    EXPECT_LT(set(7, 0), 1.0);
    EXPECT_GE(set(7, 1), 0.5);
    EXPECT_LT(set(7, 1), 1.0);
  }
}

TEST(GenerateKdtSet, SinglePointIsUniformOverCube) {
  std::vector<double> sum(5, 0.0);
  constexpr int kTrials = 20000;
  for (int s = 0; s < kTrials; ++s) {
    const auto set = generate_kdt_set(1, 5, static_cast<std::uint64_t>(s));
    for (std::size_t m = 0; m < 5; ++m) sum[m] += set(0, m);
  }
  // Mean of a uniform coordinate: 1/2 with sd sqrt(1/12 / N) ~ 0.002.
  for (double s : sum) EXPECT_NEAR(s / kTrials, 0.5, 0.01);
}

TEST(GenerateKdtSet, SixteenPointsFillFourByFourGrid) {
  const auto set = generate_kdt_set(16, 2, 3);
  std::set<std::pair<int, int>> occupied;
  for (std::size_t i = 0; i < set.size(); ++i)
    occupied.insert({static_cast<int>(set(i, 0) * 4), static_cast<int>(set(i, 1) * 4)});
  EXPECT_EQ(occupied.size(), 16u);
}

TEST(GenerateKdtSet, EveryPointInsideItsCell) {
  for (std::uint64_t n : {1u, 7u, 59u, 152u, 1000u})
    for (std::size_t d : {1u, 2u, 3u, 6u}) {
      const auto set = generate_kdt_set(n, d, n * 31 + d);
      const auto cells = calculate_all_bounds(n, d);
      for (std::size_t i = 0; i < n; ++i) {
        EXPECT_TRUE(cells[i].contains(set.point(i))) << "n=" << n << " d=" << d << " i=" << i;
        for (double x : set.point(i)) EXPECT_LT(x, 1.0);
      }
    }
}

TEST(GenerateKdtSet, OrderAndThreadIndependent) {
  constexpr std::uint64_t n = 997;
  constexpr std::size_t d = 3;
  const auto sequential = generate_kdt_set(n, d, 77, 1);
  EXPECT_EQ(sequential, generate_kdt_set(n, d, 77, 4));

  SampleSet reversed(n, d, sequential.spec());
  for (std::uint64_t i = n; i-- > 0;) kdt_point(n, d, i, 77, reversed.point(i));
  EXPECT_EQ(sequential, reversed);

  // Concurrent writers on disjoint index ranges.
  SampleSet threaded(n, d, sequential.spec());
  {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < 3; ++t)
      workers.emplace_back([&, t] {
        for (std::uint64_t i = t; i < n; i += 3) kdt_point(n, d, i, 77, threaded.point(i));
      });
  }
  EXPECT_EQ(sequential, threaded);
}

TEST(GenerateKdtSet, GridCaseMatchesJitteredGridCells) {
  // n = 2^(kd) gives the regular grid, so cell membership agrees with jittered_grid's cells.
  for (auto [n, d, k] : {std::tuple{16u, 2u, 4u}, std::tuple{64u, 3u, 4u}, std::tuple{8u, 1u, 8u}}) {
    const auto cells = calculate_all_bounds(n, d);
    std::set<std::vector<int>> grid_cells;
    for (const auto& c : cells) {
      std::vector<int> idx;
      for (std::size_t m = 0; m < d; ++m) {
        EXPECT_DOUBLE_EQ(c.upper[m] - c.lower[m], 1.0 / k);
        idx.push_back(static_cast<int>(std::lround(c.lower[m] * k)));
      }
      grid_cells.insert(idx);
    }
    EXPECT_EQ(grid_cells.size(), n);
  }
}

TEST(GenerateKdtSet, RejectsInvalidShape) {
  EXPECT_THROW(generate_kdt_set(0, 2, 1), InvalidArgument);
  EXPECT_THROW(generate_kdt_set(3, 0, 1), InvalidArgument);
}

}  // namespace
}  // namespace kdstrat
