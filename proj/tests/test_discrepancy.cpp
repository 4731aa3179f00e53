#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "kdstrat/discrepancy.hpp"
#include "kdstrat/kdtree.hpp"
#include "oracles.hpp"

namespace kdstrat {
namespace {

std::vector<std::vector<double>> rows(const SampleSet& set) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < set.size(); ++i) out.emplace_back(set.point(i).begin(), set.point(i).end());
  return out;
}

SampleSet single_point(std::vector<double> p) {
  const std::size_t d = p.size();
  return SampleSet(1, d, std::move(p));
}

TEST(Warnock, OneDimensionalAnalyticValues) {
  // Integral of the squared local discrepancy, by hand:
  //   P = {0}:   int (1 - t)^2 = 1/3
  //   P = {1/2}: int_0^1/2 t^2 + int_1/2^1 (1 - t)^2 = 1/12
  //   P = {1}:   int t^2 = 1/3
  EXPECT_NEAR(l2_star_discrepancy_squared(single_point({0.0})), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(l2_star_discrepancy_squared(single_point({0.5})), 1.0 / 12.0, 1e-12);
  EXPECT_NEAR(l2_star_discrepancy_squared(single_point({1.0})), 1.0 / 3.0, 1e-12);
}

TEST(Warnock, AgreesWithScanQuadrature) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    for (std::size_t d : {1u, 2u}) {
      const std::uint64_t n = 4 + 5 * seed;
      const auto set = generate({SamplerKind::random, Randomization::none, seed}, n, d);
      const double scan = testing::scan_l2_squared(rows(set), d == 1 ? 1'000'000 : 1000);
      EXPECT_NEAR(l2_star_discrepancy(set), std::sqrt(scan), 1e-3) << "n=" << n << " d=" << d;
    }
  }
}

TEST(Warnock, ThreadCountDoesNotChangeValue) {
  const auto set = generate({SamplerKind::kdt, Randomization::none, 3}, 3000, 3);
  EXPECT_EQ(l2_star_discrepancy(set, 1), l2_star_discrepancy(set, 4));
}

TEST(Warnock, RejectsEmptySet) { EXPECT_THROW(l2_star_discrepancy(SampleSet(0, 2)), InvalidArgument); }

TEST(LinfExact, CenteredPointInSquare) {
  EXPECT_DOUBLE_EQ(linf_star_discrepancy_exact(single_point({0.5, 0.5})), 0.75);
}

TEST(LinfExact, CenteredPointOnLine) {
  EXPECT_DOUBLE_EQ(linf_star_discrepancy_exact(single_point({0.5})), 0.5);
}

TEST(LinfExact, TwoMidpointsOnLine) {
  const SampleSet set(2, 1, std::vector<double>{0.25, 0.75});
  EXPECT_DOUBLE_EQ(linf_star_discrepancy_exact(set), 0.25);
}

TEST(LinfExact, OneDimensionalScanOracle) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto set = generate({SamplerKind::random, Randomization::none, seed}, 10, 1);
    double worst = 0.0;
    constexpr int kScan = 100000;
    for (int a = 0; a <= kScan; ++a) {
      const double t = double(a) / kScan;
      double closed = 0, open = 0;
      for (double x : set.coordinates()) {
        closed += x <= t;
        open += x < t;
      }
      worst = std::max({worst, std::abs(closed / 10 - t), std::abs(open / 10 - t)});
    }
    EXPECT_NEAR(linf_star_discrepancy_exact(set), worst, 2e-5);
  }
}

TEST(LinfExact, MatchesBruteForceEnumeration) {
  for (std::uint64_t seed = 0; seed < 4; ++seed)
    for (std::size_t d : {1u, 2u, 3u})
      for (SamplerKind kind : {SamplerKind::random, SamplerKind::kdt, SamplerKind::halton}) {
        const std::uint64_t n = 3 + 7 * seed;
        const auto set = generate({kind, Randomization::none, seed}, n, d);
        EXPECT_NEAR(linf_star_discrepancy_exact(set), testing::brute_force_linf(rows(set)), 1e-15)
            << to_string(kind) << " n=" << n << " d=" << d;
      }
  // Repeated coordinates exercise the open/closed distinction.
  const SampleSet ties(4, 2, std::vector<double>{0.5, 0.5, 0.5, 0.25, 0.25, 0.5, 0.75, 0.75});
  EXPECT_NEAR(linf_star_discrepancy_exact(ties), testing::brute_force_linf(rows(ties)), 1e-15);
}

TEST(LinfExact, DominatesL2) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto set = generate({SamplerKind::lhs, Randomization::none, seed}, 40, 1 + seed % 3);
    EXPECT_GE(linf_star_discrepancy_exact(set), l2_star_discrepancy(set));
  }
}

TEST(LinfExact, RejectsLargeInstances) {
  EXPECT_THROW(linf_star_discrepancy_exact(SampleSet(513, 2)), InvalidArgument);
  EXPECT_THROW(linf_star_discrepancy_exact(SampleSet(10, 4)), InvalidArgument);
  EXPECT_NO_THROW(linf_star_discrepancy_exact(generate({SamplerKind::random}, 512, 3)));
}

TEST(WorstCaseBound, FormulaValues) {
  EXPECT_DOUBLE_EQ(theorem1_bound(4, 1), 0.25);
  EXPECT_DOUBLE_EQ(theorem1_bound(16, 2), 1.0);
  EXPECT_DOUBLE_EQ(theorem1_bound(1, 1), 1.0);
  EXPECT_THROW(theorem1_bound(0, 1), InvalidArgument);
}

TEST(WorstCaseBound, HoldsForKdtSets) {
  for (std::uint64_t n : {4u, 12u, 16u, 59u, 100u})
    for (std::uint64_t seed = 0; seed < 5; ++seed)
      EXPECT_LE(linf_star_discrepancy_exact(generate_kdt_set(n, 2, seed)), theorem1_bound(n, 2));
}

TEST(MeanL2, SingleRepEqualsDirectCall) {
  const SamplerSpec spec{SamplerKind::kdt};
  const auto m = mean_l2_discrepancy(spec, 64, 2, 1, 17);
  SamplerSpec one = spec;
  one.master_seed = realization_seed(17, 0);
  EXPECT_EQ(m.mean, l2_star_discrepancy(generate(one, 64, 2)));
  EXPECT_EQ(m.stderr_of_mean, 0.0);
}

TEST(MeanL2, RandomPointsMatchExpectedSquaredDiscrepancy) {
  // For n iid uniform points E[D^2] = (2^-d - 3^-d) / n; d = 1, n = 100 gives 1/600.
  const auto mean_square = [](std::size_t reps, std::uint64_t seed) {
    CompensatedSum sum;
    for (std::size_t r = 0; r < reps; ++r)
      sum.add(l2_star_discrepancy_squared(random_set(100, 1, realization_seed(seed, r))));
    return sum.value() / double(reps);
  };
  const double oracle = mean_square(10000, 999);
  EXPECT_NEAR(oracle, 1.0 / 600.0, 0.03 / 600.0);
  EXPECT_NEAR(mean_square(1000, 5), oracle, 0.1 * oracle);
}

TEST(MeanL2, KdtBeatsRandom) {
  const auto kdt = mean_l2_discrepancy({SamplerKind::kdt}, 1024, 2, 100, 1);
  const auto random = mean_l2_discrepancy({SamplerKind::random}, 1024, 2, 100, 1);
  EXPECT_LT(kdt.mean, random.mean);
}

TEST(MeanL2, JitteredGridDecreasesThroughPerfectSquares) {
  double previous = 1.0;
  for (std::uint64_t n : {4u, 16u, 64u, 256u}) {
    const double mean = mean_l2_discrepancy({SamplerKind::jittered_grid}, n, 2, 50, 3).mean;
    EXPECT_LT(mean, previous) << "n=" << n;
    previous = mean;
  }
}

TEST(MeanL2, QmcKindsAreShiftRandomized) {
  const auto m = mean_l2_discrepancy({SamplerKind::sobol}, 64, 2, 20, 4);
  EXPECT_GT(m.stderr_of_mean, 0.0);
  EXPECT_THROW(mean_l2_discrepancy({SamplerKind::kdt}, 8, 2, 0, 1), InvalidArgument);
}

TEST(CompensatedSum, RecoversCancelledDigits) {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  EXPECT_EQ(s.value(), 1000.0);
}

}  // namespace
}  // namespace kdstrat
