#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "mcld/replicas.hpp"
#include "mcld/rng.hpp"
#include "mcld/stats.hpp"

using namespace mcld;

namespace {

std::vector<double> exp_sample(RngStream& rng, double rate, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.exponential(rate);
  return v;
}

}  // namespace

TEST(KsTwoSample, IdenticalSamplesGiveZero) {
  RngStream rng(1, 0);
  const auto a = exp_sample(rng, 1.0, 100);
  const StatReport r = ks_two_sample(a, a);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(KsTwoSample, TiesAreSteppedJointly) {
  const std::vector<double> a(30, 1.0);
  std::vector<double> b(30, 1.0);
  b[0] = 2.0;
  EXPECT_NEAR(ks_two_sample(a, b).statistic, 1.0 / 30.0, 1e-15);
}

TEST(KsOneSample, NullCalibrationAndPower) {
  RngStream rng(2, 0);
  std::vector<double> pvals;
  for (int r = 0; r < 200; ++r) {
    const auto s = exp_sample(rng, 1.0, 10000);
    pvals.push_back(ks_one_sample(s, [](double x) { return 1.0 - std::exp(-x); }).p_value);
  }
  EXPECT_GT(ks_one_sample(pvals, [](double p) { return std::clamp(p, 0.0, 1.0); }).p_value, 0.01);

  const auto alt = exp_sample(rng, 2.0, 10000);
  EXPECT_LT(ks_one_sample(alt, [](double x) { return 1.0 - std::exp(-x); }).p_value, 1e-10);
}

TEST(KsOneSample, TooFewSamples) {
  const std::vector<double> few(5, 0.3);
  EXPECT_THROW(ks_one_sample(few, [](double x) { return x; }), TooFewSamples);
  EXPECT_THROW(ks_two_sample(few, few), TooFewSamples);
}

TEST(ChiSquare, KnownValue) {
  // (10-15)^2/15 + (20-15)^2/15 = 10/3 on one degree of freedom.
  const std::vector<double> obs{10, 20};
  const std::vector<double> exp{15, 15};
  const StatReport r = chi_square(obs, exp);
  EXPECT_NEAR(r.statistic, 10.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.p_value, std::erfc(std::sqrt(10.0 / 3.0 / 2.0)), 1e-10);
}

TEST(Verdicts, ThresholdText) {
  StatReport r;
  r.p_value = 0.2;
  r.statistic = 0.07;
  EXPECT_TRUE(require_p_above(r, 0.01).passed);
  EXPECT_EQ(r.threshold, "p > 0.01");
  EXPECT_FALSE(require_statistic_below(r, 0.05).passed);
  EXPECT_EQ(r.threshold, "statistic < 0.05");
}

TEST(Replicas, OrderedAndThreadIndependent) {
  auto fn = [](RngStream& rng, std::size_t k) { return rng.uniform() + static_cast<double>(k); };
  const auto one = run_replicas(64, 17, fn, 1);
  const auto many = run_replicas(64, 17, fn, 4);
  EXPECT_EQ(one, many);
  for (std::size_t k = 0; k < 64; ++k) EXPECT_EQ(std::floor(one[k]), static_cast<double>(k));
}

TEST(Replicas, ExceptionsPropagate) {
  auto fn = [](RngStream&, std::size_t k) -> int {
    if (k == 5) throw std::runtime_error("boom");
    return 0;
  };
  EXPECT_THROW(run_replicas(10, 1, fn, 3), std::runtime_error);
}
