#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "mcld/core.hpp"
#include "mcld/stats.hpp"

using namespace mcld;

TEST(MassVector, RejectsUnsortedOrNonPositive) {
  EXPECT_THROW(MassVector({1.0, 2.0}), std::invalid_argument);
  EXPECT_THROW(MassVector({1.0, 0.0}), std::invalid_argument);
  EXPECT_NO_THROW(MassVector({2.0, 2.0, 1.0}));
  EXPECT_NO_THROW(MassVector{});
}

TEST(SortDesc, Examples) {
  EXPECT_EQ(sort_desc(OrderedBlocks{1, 3, 2}), (MassVector{3, 2, 1}));
  EXPECT_EQ(sort_desc(OrderedBlocks{}), MassVector{});
  EXPECT_EQ(sort_desc(OrderedBlocks{2, 2}), (MassVector{2, 2}));
}

TEST(L2Distance, Examples) {
  EXPECT_EQ(l2_distance(MassVector{3, 1}, MassVector{3, 1}), 0.0);
  EXPECT_EQ(l2_distance(MassVector{1}, MassVector{}), 1.0);
  EXPECT_DOUBLE_EQ(l2_distance(MassVector{4, 3}, MassVector{}), 5.0);
}

TEST(Truncate, Examples) {
  const MassVector m{3, 2, 1};
  EXPECT_EQ(truncate(m, 2), (MassVector{3, 2}));
  EXPECT_EQ(truncate(m, 5), m);
  EXPECT_EQ(truncate(m, 0), MassVector{});
}

TEST(SampleExpMeasure, SingleAtomStructure) {
  RngStream rng(1, 0);
  const PointMeasure mu = sample_exp_measure(MassVector{1}, rng);
  ASSERT_EQ(mu.size(), 1u);
  EXPECT_EQ(mu[0].mass, 1.0);
  EXPECT_LT(mu[0].height, 0.0);
  EXPECT_THROW(sample_exp_measure(MassVector{}, rng), std::invalid_argument);
}

TEST(SampleExpMeasure, MeanDepthOfRateTwoAtom) {
  RngStream rng(2, 0);
  double s = 0.0;
  const int reps = 100000;
  for (int r = 0; r < reps; ++r) s += -sample_exp_measure(MassVector{2}, rng)[0].height;
  EXPECT_NEAR(s / reps, 0.5, 0.005);
}

TEST(SampleExpMeasure, HeavierAtomHigherWithProbabilityThreeQuarters) {
  RngStream rng(3, 0);
  int top = 0;
  const int reps = 100000;
  for (int r = 0; r < reps; ++r) top += sample_exp_measure(MassVector{3, 1}, rng)[0].mass == 3.0;
  EXPECT_NEAR(static_cast<double>(top) / reps, 0.75, 0.0075);
}

TEST(SampleExpMeasure, EqualSeedsGiveIdenticalMeasures) {
  const MassVector m{2, 1.5, 1, 0.5};
  RngStream a(99, 7);
  RngStream b(99, 7);
  EXPECT_EQ(sample_exp_measure(m, a), sample_exp_measure(m, b));
  RngStream c(99, 8);
  EXPECT_NE(sample_exp_measure(m, a), sample_exp_measure(m, c));
}

TEST(SampleExpMeasure, MassNearZeroGrowsLinearly) {
  // mu[-K, 0] / K stays bounded for truncations of m_i = i^-0.6 (sum m_i^2 < inf).
  std::vector<double> m;
  for (int i = 1; i <= 4000; ++i) m.push_back(std::pow(i, -0.6));
  RngStream rng(4, 0);
  const PointMeasure mu = sample_exp_measure(MassVector(m), rng);
  double sum_sq = 0.0;
  for (double x : m) sum_sq += x * x;
  for (double K : {0.5, 1.0, 2.0, 4.0}) {
    const double ratio = mu.mass_in(-K, 0.0) / K;
    EXPECT_LT(ratio, 2.0 * sum_sq) << "K=" << K;
  }
}

TEST(ExpMeasureFrom, PerturbsHeightTies) {
  std::vector<std::string> notes;
  auto saved = detail::notice_sink();
  detail::notice_sink() = [&](const std::string& s) { notes.push_back(s); };
  const std::vector<double> e{1.0, 1.0};
  const PointMeasure mu = exp_measure_from(MassVector{1, 1}, e);
  detail::notice_sink() = saved;
  ASSERT_EQ(mu.size(), 2u);
  EXPECT_LT(mu[1].height, mu[0].height);
  EXPECT_EQ(notes.size(), 1u);
}

TEST(SizeBiasedReorder, FirstBlockProbability) {
  RngStream rng(5, 0);
  int first_two = 0;
  const int reps = 100000;
  for (int r = 0; r < reps; ++r) first_two += size_biased_reorder(MassVector{2, 1}, rng)[0] == 2.0;
  EXPECT_NEAR(static_cast<double>(first_two) / reps, 2.0 / 3.0, 0.01 * 2.0 / 3.0);
  EXPECT_EQ(size_biased_reorder(MassVector{5}, rng), OrderedBlocks{5});
}

TEST(SizeBiasedReorder, EqualMassesAllOrdersEquallyLikely) {
  // Track the labels of three equal blocks through the exponential clocks.
  RngStream rng(6, 0);
  std::map<std::vector<int>, double> counts;
  const int reps = 100000;
  for (int r = 0; r < reps; ++r) {
    std::vector<std::pair<double, int>> clocks;
    for (int i = 0; i < 3; ++i) clocks.push_back({rng.exponential(1.0), i});
    std::sort(clocks.begin(), clocks.end());
    counts[{clocks[0].second, clocks[1].second, clocks[2].second}] += 1.0;
  }
  ASSERT_EQ(counts.size(), 6u);
  std::vector<double> obs;
  for (auto& [k, c] : counts) obs.push_back(c);
  std::vector<double> exp(6, reps / 6.0);
  EXPECT_GT(chi_square(obs, exp).p_value, 0.01);
}

TEST(SizeBiasedProb, Examples) {
  EXPECT_DOUBLE_EQ(size_biased_prob(MassVector{2, 1}, OrderedBlocks{2, 1}), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(size_biased_prob(MassVector{2, 1}, OrderedBlocks{1, 2}), 1.0 / 3.0);
  EXPECT_EQ(size_biased_prob(MassVector{2, 1}, OrderedBlocks{3}), 0.0);
}

TEST(SizeBiasedProb, SumsToOneOverDistinctOrderings) {
  const std::vector<MassVector> cases{
      MassVector{3, 2, 1}, MassVector{5, 4, 3, 2, 1.5, 1}, MassVector{2, 2, 1}, MassVector{1, 1, 1, 1},
      MassVector{4, 1, 1, 0.5, 0.5, 0.5}, MassVector{7}};
  for (const MassVector& m : cases) {
    std::vector<double> perm(m.begin(), m.end());
    std::sort(perm.begin(), perm.end());
    double total = 0.0;
    do {
      total += size_biased_prob(m, OrderedBlocks(perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(RngStream, UniformIsOpenAndReproducible) {
  RngStream a(11, 3);
  RngStream b(11, 3);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_EQ(u, b.uniform());
  }
}
