#include <gtest/gtest.h>

#include <cmath>

#include "mcld/mcld_markov.hpp"
#include "mcld/particle_system.hpp"
#include "mcld/stats.hpp"

using namespace mcld;

namespace {

ParticleState make(std::vector<double> m, std::vector<double> y, double lambda) {
  return ParticleState(std::move(m), std::move(y), lambda);
}

}  // namespace

TEST(ParticleInit, SingleParticleBelowZero) {
  RngStream rng(1, 0);
  const ParticleState s = init(MassVector{1}, 1.0, rng);
  ASSERT_EQ(s.particles().size(), 1u);
  EXPECT_LT(s.particles()[0].height, 0.0);
  EXPECT_EQ(s.time(), 0.0);
}

TEST(ParticleInit, HeavierParticleOnTopThreeQuartersOfTheTime) {
  RngStream rng(2, 0);
  int top = 0;
  const int reps = 100000;
  for (int r = 0; r < reps; ++r) top += blocks(init(MassVector{3, 1}, 1.0, rng))[0] == 3.0;
  EXPECT_NEAR(static_cast<double>(top) / reps, 0.75, 0.0075);
}

TEST(NextEvent, Examples) {
  const EventSchedule a = next_event(make({1, 1}, {-1, -1.5}, 1.0));
  EXPECT_DOUBLE_EQ(a.death_time, 1.0);
  ASSERT_EQ(a.merge_times.size(), 1u);
  EXPECT_DOUBLE_EQ(a.merge_times[0], 0.5);
  EXPECT_EQ(a.earliest().second, 0);

  const EventSchedule b = next_event(make({5}, {-2}, 2.0));
  EXPECT_DOUBLE_EQ(b.death_time, 1.0);

  EXPECT_THROW(next_event(make({1}, {-1}, 0.0)), NoFurtherEvent);
}

TEST(Advance, TwoParticlesDieOneAfterAnother) {
  ParticleState s = make({1, 1}, {-1, -3}, 1.0);
  auto e1 = s.advance();
  EXPECT_EQ(e1.kind, ParticleEventKind::BlockDeath);
  EXPECT_DOUBLE_EQ(e1.time, 1.0);
  auto e2 = s.advance();
  EXPECT_EQ(e2.kind, ParticleEventKind::BlockDeath);
  EXPECT_DOUBLE_EQ(e2.time, 2.0);
  EXPECT_FALSE(s.has_next_event());
  EXPECT_EQ(s.death_times(), (std::vector<double>{1.0, 2.0}));
}

TEST(Advance, MergeThenJointDeath) {
  ParticleState s = make({1, 1}, {-1, -1.5}, 1.0);
  auto e1 = s.advance();
  EXPECT_EQ(e1.kind, ParticleEventKind::BlockMerge);
  EXPECT_DOUBLE_EQ(e1.time, 0.5);
  ASSERT_EQ(s.block_list().size(), 1u);
  EXPECT_DOUBLE_EQ(s.block_list()[0].height, -0.5);
  const auto ps = s.particles();
  EXPECT_EQ(ps[0].height, ps[1].height);

  ParticleState s2 = s;
  s2.run(0.6);
  EXPECT_EQ(blocks(s2), OrderedBlocks{2});

  auto e2 = s.advance();
  EXPECT_EQ(e2.kind, ParticleEventKind::BlockDeath);
  EXPECT_DOUBLE_EQ(e2.time, 1.0);
  EXPECT_DOUBLE_EQ(e2.mass, 2.0);
  EXPECT_TRUE(blocks(s).empty());
  EXPECT_TRUE(to_measure(s).empty());
}

TEST(Blocks, OnePerParticleAtStart) {
  RngStream rng(3, 0);
  const ParticleState s = init(MassVector{3, 2, 1}, 1.0, rng);
  EXPECT_EQ(blocks(s).size(), 3u);
  const PointMeasure mu = to_measure(s);
  EXPECT_EQ(mu.size(), 3u);
  EXPECT_DOUBLE_EQ(mu.total_mass(), 6.0);
}

TEST(DeathTimesRecursive, Examples) {
  const std::vector<double> m{1, 1};
  EXPECT_EQ(death_times_recursive(m, std::vector<double>{-1, -3}, 1.0), (std::vector<double>{1, 2}));
  EXPECT_EQ(death_times_recursive(m, std::vector<double>{-1, -1.5}, 1.0), (std::vector<double>{1, 1}));
  EXPECT_DOUBLE_EQ(death_times_recursive(std::vector<double>{2.5}, std::vector<double>{-3}, 1.5)[0], 2.0);
  EXPECT_THROW(death_times_recursive(m, std::vector<double>{-1, -3}, 0.0), LambdaZero);
}

TEST(DeathTimesRecursive, AgreesWithEventDrivenRun) {
  RngStream rng(4, 0);
  for (int r = 0; r < 300; ++r) {
    std::vector<double> m;
    const int n = 1 + static_cast<int>(rng.below(40));
    for (int i = 0; i < n; ++i) m.push_back(0.05 + 2.0 * rng.uniform());
    const double lambda = std::vector<double>{0.1, 1.0, 10.0}[r % 3];
    ParticleState s = init(sort_desc(m), lambda, rng);
    const std::vector<double> closed = death_times_recursive(s);
    s.run(kInf);
    for (std::size_t i = 0; i < closed.size(); ++i) {
      EXPECT_NEAR(s.death_times()[i], closed[i], 1e-9 * closed[i]);
    }
  }
}

TEST(InsertParticle, HandExample) {
  const ParticleState s0 = make({1}, {-1}, 1.0);
  const InsertionReport rep = insert_particle(s0, 0.5, -0.5);
  EXPECT_DOUBLE_EQ(rep.old_times[0], 1.0);
  EXPECT_DOUBLE_EQ(rep.new_times[0], 0.75);
  EXPECT_DOUBLE_EQ(rep.bounds[0], 0.5);
  EXPECT_TRUE(rep.within_bound);
}

TEST(InsertParticle, BelowEverythingChangesNothing) {
  RngStream rng(5, 0);
  const ParticleState s0 = init(MassVector{2, 1.5, 1, 0.5}, 1.0, rng);
  double lowest = 0.0;
  for (const Particle& p : s0.particles()) lowest = std::min(lowest, p.height);
  const InsertionReport rep = insert_particle(s0, 3.0, lowest - 1.0);
  EXPECT_EQ(rep.old_times, rep.new_times);
  for (double b : rep.bounds) EXPECT_EQ(b, 0.0);
  EXPECT_TRUE(rep.within_bound);
}

TEST(InsertParticle, BoundHoldsOnRandomConfigurations) {
  RngStream rng(6, 0);
  for (int r = 0; r < 200; ++r) {
    std::vector<double> m;
    const int n = 1 + static_cast<int>(rng.below(30));
    for (int i = 0; i < n; ++i) m.push_back(0.05 + 2.0 * rng.uniform());
    const double lambda = 0.2 + 3.0 * rng.uniform();
    const ParticleState s0 = init(sort_desc(m), lambda, rng);
    const InsertionReport rep = insert_particle(s0, 0.05 + rng.uniform(), -rng.exponential(0.5));
    EXPECT_TRUE(rep.within_bound);
  }
}

TEST(ForestFire, BurnsAreReinsertedAndCountConserved) {
  RngStream rng(7, 0);
  ParticleState s = init_forest_fire(std::vector<std::size_t>(8, 1), 0.4, rng);
  const auto events = s.run(2.0, &rng);
  std::size_t alive = 0;
  for (const auto& b : s.block_list()) alive += b.members.size();
  EXPECT_EQ(alive, 8u);
  EXPECT_NEAR(s.alive_mass(), 1.0, 1e-12);
  for (const auto& ev : events) EXPECT_NE(ev.kind, ParticleEventKind::BlockDeath);
}

TEST(ForestFire, BurnTimesArePoissonWithRateNLambda) {
  RngStream rng(8, 0);
  const std::size_t n = 8;
  ParticleState s = init_forest_fire(std::vector<std::size_t>(n, 1), 0.4, rng);
  s.run(2000.0, &rng);
  std::vector<double> gaps;
  double prev = 0.0;
  for (const ControlAtom& b : s.burns()) {
    gaps.push_back(b.time - prev);
    prev = b.time;
  }
  ASSERT_GT(gaps.size(), 1000u);
  EXPECT_NEAR(mean(gaps), 1.0 / 3.2, 0.05 / 3.2);
  EXPECT_GT(ks_one_sample(gaps, [](double x) { return 1.0 - std::exp(-3.2 * x); }).p_value, 0.01);
}

TEST(Threshold, BlocksAboveOmegaAreRemoved) {
  ParticleState s(std::vector<double>{1, 1, 1}, std::vector<double>{-1, -1.2, -5}, 0.0, ModeSpec::threshold(1.5));
  auto ev = s.advance();
  EXPECT_EQ(ev.kind, ParticleEventKind::Freeze);
  EXPECT_TRUE(ev.after_merge);
  EXPECT_DOUBLE_EQ(s.frozen_mass(), 2.0);
  EXPECT_EQ(blocks(s), OrderedBlocks{1});
  EXPECT_FALSE(s.has_next_event());
}

TEST(ParticleProjection, LargestBlockMatchesMarkovChain) {
  RngStream a(9, 0);
  RngStream b(9, 1);
  std::vector<double> pa;
  std::vector<double> mc;
  for (int r = 0; r < 20000; ++r) {
    ParticleState s = init(MassVector{2, 1, 1, 0.5}, 1.0, a);
    s.run(0.4);
    pa.push_back(sort_desc(blocks(s)).largest());
    mc.push_back(simulate(MassVector{2, 1, 1, 0.5}, 1.0, 0.4, b).final_state().largest());
  }
  EXPECT_GT(ks_two_sample(pa, mc).p_value, 0.01);
}

TEST(Segments, RecordSlopeChanges) {
  ParticleState s = make({1, 1}, {-1, -3}, 1.0);
  s.record_paths();
  s.run(kInf);
  const auto& seg = s.segments();
  // Initial rows for both particles, then particle 1 slows to lambda after particle 0 dies.
  ASSERT_EQ(seg.size(), 3u);
  EXPECT_EQ(seg[0].id, 0u);
  EXPECT_DOUBLE_EQ(seg[0].slope, 1.0);
  EXPECT_EQ(seg[1].id, 1u);
  EXPECT_DOUBLE_EQ(seg[1].slope, 2.0);
  EXPECT_EQ(seg[2].id, 1u);
  EXPECT_DOUBLE_EQ(seg[2].t0, 1.0);
  EXPECT_DOUBLE_EQ(seg[2].y0, -1.0);
  EXPECT_DOUBLE_EQ(seg[2].slope, 1.0);
}
