#include <gtest/gtest.h>

#include <cmath>

#include "mcld/path_samplers.hpp"
#include "mcld/stats.hpp"

using namespace mcld;

namespace {

GridPath from_values(std::vector<double> v, double h = 1.0) {
  return GridPath{h, h * static_cast<double>(v.size() - 1), std::move(v)};
}

}  // namespace

TEST(SampleBmpd, StartsAtZero) {
  RngStream rng(1, 0);
  const GridPath p = sample_bmpd(0.5, 0.01, 1.0, rng);
  EXPECT_EQ(p.samples.size(), 101u);
  EXPECT_EQ(p.samples[0], 0.0);
  EXPECT_THROW(sample_bmpd(0.0, 0.0, 1.0, rng), std::invalid_argument);
}

TEST(SampleBmpd, MeanAndVarianceAtTwo) {
  RngStream rng(2, 0);
  std::vector<double> at2;
  for (int r = 0; r < 10000; ++r) at2.push_back(sample_bmpd(1.0, 0.01, 2.0, rng).samples.back());
  const double se = std::sqrt(2.0 / 10000.0);
  EXPECT_NEAR(mean(at2), 0.0, 3.0 * se);
  EXPECT_NEAR(variance(at2), 2.0, 0.1);
}

TEST(SampleLevy, NoJumpsMatchesBmpd) {
  RngStream a(3, 0);
  RngStream b(3, 1);
  LevyParams prm{1.0, 0.5, {}};
  std::vector<double> w;
  std::vector<double> bm;
  for (int r = 0; r < 10000; ++r) {
    w.push_back(sample_levy_wr(prm, 0.02, 2.0, a).samples.back());
    bm.push_back(sample_bmpd(0.5, 0.02, 2.0, b).samples.back());
  }
  EXPECT_GT(ks_two_sample(w, bm).p_value, 0.01);
}

TEST(SampleLevy, PureJumpPath) {
  RngStream rng(4, 0);
  const LevyParams prm{0.0, 0.25, {1.0}};
  for (int r = 0; r < 100; ++r) {
    const GridPath p = sample_levy_wr(prm, 0.01, 3.0, rng);
    // Before the jump the path is (tau - 1) x; afterwards it is 1 + (tau - 1) x.
    for (std::size_t i = 0; i < p.samples.size(); ++i) {
      const double base = (0.25 - 1.0) * p.x(i);
      const double d = p.samples[i] - base;
      EXPECT_TRUE(std::abs(d) < 1e-12 || std::abs(d - 1.0) < 1e-12);
      if (i > 0 && std::abs(p.samples[i - 1] - (0.25 - 1.0) * p.x(i - 1) - 1.0) < 1e-12) {
        EXPECT_NEAR(d, 1.0, 1e-12);
      }
    }
  }
}

TEST(SampleLevy, MeanFormula) {
  RngStream rng(5, 0);
  const LevyParams prm{1.0, 0.2, {0.5, 0.3}};
  const double x = 1.5;
  std::vector<double> v;
  for (int r = 0; r < 10000; ++r) v.push_back(sample_levy_wr(prm, 0.005, x, rng).samples.back());
  double expect = prm.tau * x - 0.5 * prm.kappa * x * x;
  for (double c : prm.c) expect += c * ((1.0 - std::exp(-c * x)) - c * x);
  const double se = std::sqrt(variance(v) / 10000.0);
  // Grid placement shifts each jump by less than h, which is far below the standard error here.
  EXPECT_NEAR(mean(v), expect, 3.0 * se);
}

TEST(LevyParams, Validation) {
  EXPECT_THROW((LevyParams{0.0, 0.0, {}}.validate()), std::invalid_argument);
  EXPECT_THROW((LevyParams{-1.0, 0.0, {}}.validate()), std::invalid_argument);
  EXPECT_THROW((LevyParams{1.0, 0.0, {0.3, 0.5}}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((LevyParams{0.0, 0.0, {0.5}}.validate()));
}

TEST(GridExcursions, MonotoneCases) {
  const GridExcursions dec = grid_excursions(from_values({0, -1, -2, -3}));
  ASSERT_EQ(dec.completed.size(), 3u);
  for (const Excursion& e : dec.completed) EXPECT_EQ(e.length, 1.0);
  EXPECT_EQ(dec.incomplete.left, 3.0);
  EXPECT_EQ(dec.incomplete.length, 0.0);

  const GridExcursions inc = grid_excursions(from_values({0, 1, 2, 3}));
  EXPECT_TRUE(inc.completed.empty());
  EXPECT_TRUE(inc.has_incomplete);
  EXPECT_EQ(inc.incomplete.length, 3.0);
}

TEST(GridExcursions, MatchesStepFunctionExcursions) {
  RngStream rng(6, 0);
  const double h = 1e-3;
  for (int r = 0; r < 20; ++r) {
    const StepFunction f = from_measure(sample_exp_measure(MassVector{0.7, 0.5, 0.4, 0.3}, rng));
    std::vector<double> v;
    for (double x = 0.0; x < f.total() - 1e-12; x += h) v.push_back(f(x));
    v.push_back(f(0.0) - 1e6);  // a final drop closes the last excursion
    const GridExcursions g = grid_excursions(from_values(v, h));
    const ExcursionList ex = excursions(f);
    ASSERT_EQ(g.completed.size(), ex.size());
    for (std::size_t k = 0; k < ex.size(); ++k) {
      EXPECT_NEAR(g.completed[k].left, ex[k].left, 2 * h);
      EXPECT_NEAR(g.completed[k].length, ex[k].length, 2 * h);
      EXPECT_EQ(g.completed[k].level, ex[k].level);
    }
  }
}

TEST(ExcursionLevelScores, ExactLevelsGiveUniformScores) {
  // Synthetic excursions with levels drawn exactly per the property; no window cut.
  RngStream rng(7, 0);
  std::vector<double> pvals;
  for (int rep = 0; rep < 100; ++rep) {
    GridExcursions g;
    for (int i = 0; i < 200; ++i) {
      const double m = 0.1 + rng.uniform();
      g.completed.push_back(Excursion{0.0, m, -rng.exponential(m)});
    }
    pvals.push_back(excursion_levels_test(excursion_level_scores(g, 0.0, 1e300)).p_value);
  }
  // Null calibration: p-values are uniform.
  EXPECT_GT(ks_one_sample(pvals, [](double p) { return std::clamp(p, 0.0, 1.0); }).p_value, 0.01);
}

TEST(ExcursionLevelScores, LengthBlindLevelsAreRejected) {
  RngStream rng(8, 0);
  GridExcursions g;
  for (int i = 0; i < 2000; ++i) {
    const double m = 0.1 + 3.0 * rng.uniform();
    g.completed.push_back(Excursion{0.0, m, -rng.exponential(1.0)});
  }
  EXPECT_LT(excursion_levels_test(excursion_level_scores(g, 0.0, 1e300)).p_value, 1e-6);
}

TEST(ExcursionLevelScores, WindowCutKeepsUniformity) {
  // Levels above the cut only, rescaled by the truncated cdf.
  RngStream rng(9, 0);
  GridExcursions g;
  g.has_incomplete = true;
  g.incomplete = Excursion{0.0, 1.0, -0.8};
  while (g.completed.size() < 3000) {
    const double m = 0.1 + 2.0 * rng.uniform();
    const double e = rng.exponential(m);
    if (e <= 0.8) g.completed.push_back(Excursion{0.0, m, -e});
  }
  const auto scores = excursion_level_scores(g, 0.0, 5.0);
  EXPECT_EQ(scores.size(), 3000u);
  EXPECT_GT(excursion_levels_test(scores).p_value, 0.01);
  const auto raw = excursion_level_products(g, 0.0);
  EXPECT_LT(ks_one_sample(raw, [](double z) { return 1.0 - std::exp(-z); }).p_value, 1e-6);
}

TEST(ExcursionLevelsTest, TooFewExcursions) {
  const std::vector<double> few(10, 0.5);
  EXPECT_THROW(excursion_levels_test(few), TooFewExcursions);
}

TEST(BmpdTiltShift, LargeLambdaDeletesAlmostEverything) {
  RngStream rng(10, 0);
  const BmpdTiltShift r = bmpd_tilt_shift(0.0, 1000.0, 1e-3, 10.0, 1.0, rng);
  double total = 0.0;
  double alive = 0.0;
  for (const Excursion& e : r.final_excursions) alive += e.length;
  total = alive + r.phi();
  EXPECT_LT(alive, 0.01 * total);
  ASSERT_EQ(r.times.size(), 11u);
  for (std::size_t k = 1; k < r.window.size(); ++k) {
    // Phi non-decreasing means the window grows by at most dt.
    EXPECT_LE(r.window[k] - r.window[k - 1], r.times[k] - r.times[k - 1] + 1e-12);
  }
  EXPECT_THROW(bmpd_tilt_shift(0.0, 0.0, 1e-3, 1.0, 1.0, rng), LambdaZero);
}

TEST(TopLengths, PadsWithZeros) {
  const ExcursionList ex{{0, 1, -1}, {1, 3, -2}};
  EXPECT_EQ(top_lengths(ex, 3), (std::vector<double>{3, 1, 0}));
}
