#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "mcld/interval_coalescent.hpp"
#include "mcld/stats.hpp"

using namespace mcld;

TEST(IcldRates, ThreeBlocks) {
  const auto r = icld_rates(OrderedBlocks{1, 2, 3}, 1.0);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].target, (OrderedBlocks{3, 3}));
  EXPECT_DOUBLE_EQ(r[0].rate, 5.0);
  EXPECT_EQ(r[1].target, (OrderedBlocks{1, 5}));
  EXPECT_DOUBLE_EQ(r[1].rate, 6.0);
  EXPECT_EQ(r[2].kind, EventKind::Delete);
  EXPECT_EQ(r[2].target, (OrderedBlocks{2, 3}));
  EXPECT_DOUBLE_EQ(r[2].rate, 6.0);
}

TEST(IcldRates, SingleBlock) {
  EXPECT_TRUE(icld_rates(OrderedBlocks{4}, 0.0).empty());
  const auto r = icld_rates(OrderedBlocks{4}, 2.0);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_DOUBLE_EQ(r[0].rate, 8.0);
  EXPECT_TRUE(r[0].target.empty());
}

TEST(IcldStep, TwoUnitBlocksAlwaysMerge) {
  RngStream rng(1, 0);
  for (int r = 0; r < 100; ++r) EXPECT_EQ(icld_step(OrderedBlocks{1, 1}, 0.0, rng).second, OrderedBlocks{2});
  EXPECT_THROW(icld_step(OrderedBlocks{3}, 0.0, rng), AbsorbedState);
}

TEST(IcldStep, DeletionFirstWithProbabilityThreeFifths) {
  RngStream rng(2, 0);
  int del = 0;
  const int reps = 100000;
  for (int r = 0; r < reps; ++r) del += icld_step(OrderedBlocks{1, 2}, 1.0, rng).second == OrderedBlocks{2};
  EXPECT_NEAR(static_cast<double>(del) / reps, 0.6, 0.006);
}

TEST(IcldExitRate, EqualsMarkovTotalRate) {
  EXPECT_DOUBLE_EQ(icld_exit_rate(OrderedBlocks{1, 2}, 1.0), total_rate(MassVector{2, 1}, 1.0));
  RngStream rng(3, 0);
  for (int r = 0; r < 500; ++r) {
    std::vector<double> b;
    const int n = 1 + static_cast<int>(rng.below(8));
    for (int i = 0; i < n; ++i) b.push_back(0.1 + 3.0 * rng.uniform());
    const double lambda = 2.0 * rng.uniform();
    const double lhs = icld_exit_rate(OrderedBlocks(b), lambda);
    const double rhs = total_rate(sort_desc(b), lambda);
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, rhs));
  }
}

TEST(IcldSimulate, SingleBlockIsDeletedAtExponentialTime) {
  RngStream rng(4, 0);
  std::vector<double> times;
  for (int r = 0; r < 5000; ++r) {
    const IcldTrajectory tr = icld_simulate(MassVector{5}, 1.0, kUntilAbsorption, rng);
    ASSERT_EQ(tr.events.size(), 1u);
    EXPECT_EQ(tr.initial, OrderedBlocks{5});
    EXPECT_TRUE(tr.final_state().empty());
    times.push_back(tr.events[0].time);
  }
  EXPECT_GT(ks_one_sample(times, [](double x) { return 1.0 - std::exp(-5.0 * x); }).p_value, 0.01);
}

TEST(IcldSimulate, CoalescentOfThreeEndsAsOneBlock) {
  RngStream rng(5, 0);
  for (int r = 0; r < 100; ++r) {
    EXPECT_EQ(icld_simulate(MassVector{1, 1, 1}, 0.0, kUntilAbsorption, rng).final_state(), OrderedBlocks{3});
  }
}

TEST(IcldSimulate, SortedMarginalMatchesMarkovChain) {
  // Largest block at t = 0.3 from m = (2, 1), lambda = 1, by both chains.
  RngStream a(6, 0);
  RngStream b(6, 1);
  std::vector<double> ic;
  std::vector<double> mc;
  const int reps = 100000;
  for (int r = 0; r < reps; ++r) {
    ic.push_back(sort_desc(icld_simulate(MassVector{2, 1}, 1.0, 0.3, a).final_state()).largest());
    mc.push_back(simulate(MassVector{2, 1}, 1.0, 0.3, b).final_state().largest());
  }
  EXPECT_GT(ks_two_sample(ic, mc).p_value, 0.01);
}

TEST(KernelIdentity, Examples) {
  const auto merge = kernel_identity_terms(MassVector{2, 1}, OrderedBlocks{3}, 1.0);
  EXPECT_DOUBLE_EQ(merge.lhs, 2.0);
  EXPECT_DOUBLE_EQ(merge.rhs, 2.0);
  const auto del = kernel_identity_terms(MassVector{2, 1}, OrderedBlocks{1}, 1.0);
  EXPECT_DOUBLE_EQ(del.lhs, 2.0);
  EXPECT_DOUBLE_EQ(del.rhs, 2.0);
  const auto none = kernel_identity_terms(MassVector{2, 1}, OrderedBlocks{7}, 1.0);
  EXPECT_EQ(none.lhs, 0.0);
  EXPECT_EQ(none.rhs, 0.0);
}

TEST(KernelIdentity, HoldsWithRepeatedMasses) {
  // Hand computation: m = (3, 2, 1), target (3, 3): both sides equal 2.
  const auto t = kernel_identity_terms(MassVector{3, 2, 1}, OrderedBlocks{3, 3}, 1.0);
  EXPECT_NEAR(t.lhs, 2.0, 1e-12);
  EXPECT_NEAR(t.rhs, 2.0, 1e-12);
  for (const OrderedBlocks& b2 : icld_one_step_targets(MassVector{2, 1, 1}, 0.5)) {
    EXPECT_LT(kernel_identity_residual(MassVector{2, 1, 1}, b2, 0.5), 1e-12);
  }
}

TEST(KernelIdentity, RandomDistinctStates) {
  RngStream rng(7, 0);
  for (int r = 0; r < 50; ++r) {
    const int n = 2 + static_cast<int>(rng.below(3));
    std::vector<double> m;
    for (int i = 0; i < n; ++i) m.push_back(0.1 + 3.0 * rng.uniform());
    const MassVector mv = sort_desc(m);
    for (double lambda : {0.0, 0.5, 2.0}) {
      for (const OrderedBlocks& b2 : icld_one_step_targets(mv, lambda)) {
        EXPECT_LT(kernel_identity_residual(mv, b2, lambda), 1e-10);
      }
    }
  }
}

TEST(KernelIdentity, MutatedMergeRateBreaksIt) {
  // Merge rate using only the mass two places to the right.
  IcldRateFn broken = [](const OrderedBlocks& b, double lambda) {
    auto rates = icld_rates(b, lambda);
    for (auto& tr : rates) {
      if (tr.kind != EventKind::Merge) continue;
      double right = 0.0;
      for (std::size_t i = tr.k + 2; i < b.size(); ++i) right += b[i];
      tr.rate = b[tr.k] * right;
    }
    return rates;
  };
  const MassVector m{3, 2, 1};
  double worst = 0.0;
  for (const OrderedBlocks& b2 : icld_one_step_targets(m, 1.0)) {
    worst = std::max(worst, kernel_identity_terms(m, b2, 1.0, broken).residual());
  }
  EXPECT_GT(worst, 0.1);
}

TEST(IcldSimulate, OrderGivenSortedPathIsSizeBiased) {
  // m = (3, 2, 1), lambda = 1, conditioned on the first jump deleting the 3:
  // the survivors (2, 1) must appear in size-biased order, (2, 1) w.p. 2/3.
  RngStream rng(8, 0);
  double first_two = 0.0;
  double total = 0.0;
  for (int r = 0; r < 100000; ++r) {
    const IcldTrajectory tr = icld_simulate(MassVector{3, 2, 1}, 1.0, kUntilAbsorption, rng);
    if (tr.events.empty() || !(tr.events[0].state_after == MassVector{2, 1})) continue;
    total += 1.0;
    first_two += tr.states[0][0] == 2.0;
  }
  ASSERT_GT(total, 1000.0);
  const std::vector<double> obs{first_two, total - first_two};
  const std::vector<double> exp{total * 2.0 / 3.0, total / 3.0};
  EXPECT_GT(chi_square(obs, exp).p_value, 0.01);
}
