#pragma once

// Cross-validation suites with pinned parameters. Each suite returns one
// verdict plus the statistics it was based on; the acceptance binary and the
// `crossvalidate` model both run them.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mcld/core.hpp"
#include "mcld/excursion_calculus.hpp"
#include "mcld/graph_models.hpp"
#include "mcld/interval_coalescent.hpp"
#include "mcld/mcld_markov.hpp"
#include "mcld/particle_system.hpp"
#include "mcld/path_samplers.hpp"
#include "mcld/replicas.hpp"
#include "mcld/rng.hpp"
#include "mcld/stats.hpp"

namespace mcld {

struct SuiteResult {
  int id = 0;
  std::string name;
  bool passed = false;
  bool skipped = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;  ///< 0: no limit
  std::vector<StatReport> reports;
};

struct SuiteOptions {
  std::uint64_t seed = 20240601;
  /// When set, replaces the deletion rates of suites 1, 3 and 6; 0 skips the deletion suites.
  std::optional<double> lambda;
  /// Use an interval-coalescent merge rate that sums one block too few (negative control).
  bool inject_bug = false;
  unsigned threads = 1;
};

inline constexpr int kSuiteCount = 13;

namespace detail {

inline std::uint64_t suite_seed(const SuiteOptions& opt, int id) {
  return opt.seed * 1000003ULL + static_cast<std::uint64_t>(id);
}

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

/// Random masses for the exact suites: a mix of distinct and repeated values.
inline std::vector<double> random_masses(RngStream& rng, std::size_t n) {
  std::vector<double> m(n);
  const bool unit = rng.uniform() < 0.25;
  for (double& x : m) x = unit ? 1.0 : 0.05 + 2.0 * rng.uniform();
  return m;
}

inline bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Deletion order and conservation along particle trajectories, shared by suites 1, 2 and 5.
struct InvariantTally {
  std::size_t trajectories = 0;
  std::size_t events = 0;
  std::size_t order_violations = 0;
  std::size_t conservation_violations = 0;
  double worst_conservation = 0.0;

  /// Call with a state at time 0, then once after every event of the same run.
  void check_state(const ParticleState& s, const std::vector<double>& initial_heights) {
    ++events;
    const double phi = s.control().total();
    const double err = std::abs(s.alive_mass() + phi + s.frozen_mass() - s.initial_total());
    worst_conservation = std::max(worst_conservation, err);
    if (err > 1e-12 * std::max(1.0, s.initial_total())) ++conservation_violations;
    // A dead particle must never sit below an alive one in the initial order.
    const std::vector<double>& td = s.death_times();
    double lowest_dead = kInf;
    for (std::size_t i = 0; i < td.size(); ++i) {
      if (std::isfinite(td[i])) lowest_dead = std::min(lowest_dead, initial_heights[i]);
    }
    for (std::size_t i = 0; i < td.size(); ++i) {
      if (!std::isfinite(td[i]) && initial_heights[i] > lowest_dead) ++order_violations;
    }
    // Only the top block can sit at level 0.
    const auto& bl = s.block_list();
    for (std::size_t k = 1; k < bl.size(); ++k) {
      if (!(bl[k].height < bl[k - 1].height)) ++order_violations;
    }
  }

  void check_death_order(const std::vector<double>& td, const std::vector<double>& initial_heights) {
    std::vector<std::size_t> idx(td.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return initial_heights[a] > initial_heights[b]; });
    for (std::size_t r = 1; r < idx.size(); ++r) {
      if (td[idx[r]] < td[idx[r - 1]]) ++order_violations;
    }
  }
};

inline InvariantTally& invariant_tally() {
  static InvariantTally tally;
  return tally;
}

/// Interval-coalescent rates whose merge term omits the right neighbour.
inline std::vector<IcldTransition> off_by_one_rates(const OrderedBlocks& b, double lambda) {
  auto rates = icld_rates(b, lambda);
  for (auto& tr : rates) {
    if (tr.kind != EventKind::Merge) continue;
    double right = 0.0;
    for (std::size_t i = tr.k + 2; i < b.size(); ++i) right += b[i];
    tr.rate = b[tr.k] * right;
  }
  return rates;
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// 1. Particle system and tilt-and-shift on identical draws.
inline SuiteResult suite_exact_coupling(const SuiteOptions& opt) {
  SuiteResult r{1, "exact coupling: particle system vs tilt-and-shift", false, false, "", 0.0, 5.0, {}};
  std::vector<double> lambdas{0.1, 1.0, 10.0};
  if (opt.lambda) lambdas = {*opt.lambda};
  RngStream rng(detail::suite_seed(opt, 1), 0);
  std::size_t configs = 0;
  std::size_t mismatched = 0;
  std::size_t reconstruct_fail = 0;
  std::size_t events = 0;
  double worst_time = 0.0;
  double worst_level = 0.0;
  std::string first_issue;
  for (int c = 0; c < 200; ++c) {
    const double lambda = lambdas[static_cast<std::size_t>(c) % lambdas.size()];
    const std::size_t n = 1 + rng.below(50);
    const MassVector m = sort_desc(detail::random_masses(rng, n));
    const PointMeasure mu = sample_exp_measure(m, rng);
    std::vector<double> masses;
    std::vector<double> heights;
    for (const Atom& a : mu) {
      masses.push_back(a.mass);
      heights.push_back(a.height);
    }
    ParticleState ps(masses, heights, lambda);
    const StepFunction f0 = from_measure(mu);
    const TiltShiftRun tr = tilt_shift_run(f0, lambda, kInf, true);
    ++configs;
    if (lambda > 0.0) detail::invariant_tally().check_state(ps, heights);
    bool ok = true;
    std::size_t i = 0;
    while (ps.has_next_event()) {
      const ParticleEvent ev = ps.advance();
      if (lambda > 0.0) detail::invariant_tally().check_state(ps, heights);
      if (i >= tr.events.size()) {
        ok = false;
        break;
      }
      const TiltShiftEvent& te = tr.events[i];
      worst_time = std::max(worst_time, std::abs(ev.time - te.time) / std::max(1.0, ev.time));
      const bool same_kind = (ev.kind == ParticleEventKind::BlockDeath) == (te.kind == TiltShiftEventKind::Shift);
      if (!same_kind || !detail::close_rel(ev.time, te.time, 1e-9)) ok = false;
      // Block sequence top to bottom against excursions left to right.
      const TiltShiftState& st = tr.states[i + 1];
      const auto& bl = ps.block_list();
      if (bl.size() != st.excursions.size()) {
        ok = false;
      } else {
        for (std::size_t k = 0; k < bl.size(); ++k) {
          if (!detail::close_rel(bl[k].mass, st.excursions[k].length, 1e-9)) ok = false;
          worst_level = std::max(worst_level, std::abs(bl[k].height - st.excursions[k].level));
          if (!detail::close_rel(bl[k].height, st.excursions[k].level, 1e-9)) ok = false;
        }
      }
      ++events;
      ++i;
    }
    if (i != tr.events.size()) ok = false;
    if (lambda > 0.0) {
      detail::invariant_tally().check_death_order(ps.death_times(), heights);
      ++detail::invariant_tally().trajectories;
    }
    // Closed-form g_t at every excursion left endpoint of every recorded state.
    for (const TiltShiftState& st : tr.states) {
      for (const Excursion& e : st.excursions) {
        const double g = g_t_reconstruct(f0, tr.control, lambda, st.time, e.left);
        if (!detail::close_rel(g, e.level, 1e-9)) ++reconstruct_fail;
      }
    }
    if (!ok) {
      ++mismatched;
      if (first_issue.empty()) first_issue = " first mismatch at config " + std::to_string(c);
    }
  }
  r.passed = mismatched == 0 && reconstruct_fail == 0;
  r.detail = std::to_string(configs) + " configs, " + std::to_string(events) + " events, " +
             std::to_string(mismatched) + " mismatched runs, " + std::to_string(reconstruct_fail) +
             " g_t mismatches, max rel time gap " + detail::fmt(worst_time) + ", max level gap " +
             detail::fmt(worst_level) + first_issue;
  return r;
}

/// 2. Closed-form death times against the event-driven run.
inline SuiteResult suite_recursive_death_times(const SuiteOptions& opt) {
  SuiteResult r{2, "recursive death times", false, false, "", 0.0, 5.0, {}};
  if (opt.lambda && *opt.lambda == 0.0) {
    r.skipped = r.passed = true;
    r.detail = "skipped: lambda = 0 has no deletions";
    return r;
  }
  RngStream rng(detail::suite_seed(opt, 2), 0);
  const std::vector<double> lambdas{0.1, 1.0, 10.0};
  std::size_t bad = 0;
  double worst = 0.0;
  for (int c = 0; c < 1000; ++c) {
    const double lambda = lambdas[static_cast<std::size_t>(c) % 3];
    const std::size_t n = 1 + rng.below(50);
    const MassVector m = sort_desc(detail::random_masses(rng, n));
    ParticleState s = init(m, lambda, rng);
    std::vector<double> heights;
    for (const Particle& p : s.particles()) heights.push_back(p.height);
    const std::vector<double> closed = death_times_recursive(s);
    detail::invariant_tally().check_state(s, heights);
    while (s.has_next_event()) {
      s.advance();
      detail::invariant_tally().check_state(s, heights);
    }
    detail::invariant_tally().check_death_order(s.death_times(), heights);
    ++detail::invariant_tally().trajectories;
    for (std::size_t i = 0; i < closed.size(); ++i) {
      const double gap = std::abs(closed[i] - s.death_times()[i]) / std::max(1.0, closed[i]);
      worst = std::max(worst, gap);
      if (!detail::close_rel(closed[i], s.death_times()[i], 1e-9)) ++bad;
    }
  }
  r.passed = bad == 0;
  r.detail = "1000 configs, " + std::to_string(bad) + " particles off, max rel gap " + detail::fmt(worst);
  return r;
}

/// 3. Intertwining kernel identity and the total-rate lemma.
inline SuiteResult suite_kernel_identity(const SuiteOptions& opt) {
  SuiteResult r{3, "kernel identity", false, false, "", 0.0, 1.0, {}};
  std::vector<double> lambdas{0.0, 0.5, 2.0};
  if (opt.lambda) lambdas = {*opt.lambda};
  const IcldRateFn rates = opt.inject_bug ? IcldRateFn(detail::off_by_one_rates) : IcldRateFn(icld_rates);
  RngStream rng(detail::suite_seed(opt, 3), 0);
  double worst = 0.0;
  double worst_rate = 0.0;
  std::size_t targets = 0;
  for (int c = 0; c < 50; ++c) {
    const std::size_t n = 1 + rng.below(4);
    std::vector<double> m;
    while (m.size() < n) {
      const double x = 0.1 + 3.0 * rng.uniform();
      if (std::find(m.begin(), m.end(), x) == m.end()) m.push_back(x);
    }
    const MassVector mv = sort_desc(m);
    for (double lambda : lambdas) {
      for (const OrderedBlocks& b2 : icld_one_step_targets(mv, lambda)) {
        worst = std::max(worst, kernel_identity_terms(mv, b2, lambda, rates).residual());
        ++targets;
      }
      std::vector<double> perm(mv.begin(), mv.end());
      std::sort(perm.begin(), perm.end());
      do {
        double exit = 0.0;
        for (const auto& tr : rates(OrderedBlocks(perm), lambda)) exit += tr.rate;
        const double total = total_rate(mv, lambda);
        worst_rate = std::max(worst_rate, std::abs(exit - total) / std::max(1.0, total));
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
  }
  r.passed = worst < 1e-10 && worst_rate < 1e-12;
  r.detail = std::to_string(targets) + " targets, max residual " + detail::fmt(worst) +
             ", max exit-rate gap " + detail::fmt(worst_rate) + (opt.inject_bug ? " (injected bug)" : "");
  return r;
}

/// 4. Insertion perturbation bound.
inline SuiteResult suite_insertion_bound(const SuiteOptions& opt) {
  SuiteResult r{4, "insertion perturbation bound", false, false, "", 0.0, 5.0, {}};
  if (opt.lambda && *opt.lambda == 0.0) {
    r.skipped = r.passed = true;
    r.detail = "skipped: lambda = 0 has no deletions";
    return r;
  }
  RngStream rng(detail::suite_seed(opt, 4), 0);
  std::size_t violations = 0;
  std::size_t engine_mismatch = 0;
  std::size_t moved = 0;
  double tightest = kInf;
  for (int c = 0; c < 200; ++c) {
    const std::size_t n = 1 + rng.below(30);
    const MassVector m = sort_desc(detail::random_masses(rng, n));
    const double lambda = 0.2 + 5.0 * rng.uniform();
    const ParticleState s0 = init(m, lambda, rng);
    const double mass = 0.05 + 2.0 * rng.uniform();
    const double height = -rng.exponential(mass);
    const InsertionReport rep = insert_particle(s0, mass, height);
    if (!rep.within_bound) ++violations;
    // New death times from the event engine with the extra particle.
    std::vector<double> masses;
    std::vector<double> heights;
    for (const Particle& p : s0.particles()) {
      masses.push_back(p.mass);
      heights.push_back(p.height);
    }
    masses.push_back(mass);
    heights.push_back(height);
    ParticleState s1(masses, heights, lambda);
    s1.run(kInf);
    for (std::size_t i = 0; i < rep.new_times.size(); ++i) {
      if (!detail::close_rel(rep.new_times[i], s1.death_times()[i], 1e-9)) ++engine_mismatch;
      const double diff = std::abs(rep.new_times[i] - rep.old_times[i]);
      if (diff > 0.0) {
        ++moved;
        tightest = std::min(tightest, rep.bounds[i] / diff);
      }
    }
  }
  r.passed = violations == 0 && engine_mismatch == 0;
  r.detail = "200 trials, " + std::to_string(violations) + " violations, " + std::to_string(moved) +
             " moved death times, smallest bound/shift ratio " + detail::fmt(tightest) + ", " +
             std::to_string(engine_mismatch) + " engine mismatches";
  return r;
}

/// 5. Deletions in height order and conservation along the trajectories of suites 1 and 2.
inline SuiteResult suite_invariants(const SuiteOptions& opt) {
  SuiteResult r{5, "deletion in height order and conservation", false, false, "", 0.0, 0.0, {}};
  if (opt.lambda && *opt.lambda == 0.0) {
    r.skipped = r.passed = true;
    r.detail = "skipped: lambda = 0 has no deletions";
    return r;
  }
  const detail::InvariantTally& t = detail::invariant_tally();
  r.passed = t.events > 0 && t.order_violations == 0 && t.conservation_violations == 0;
  r.detail = std::to_string(t.events) + " states checked, " + std::to_string(t.order_violations) +
             " order violations, " + std::to_string(t.conservation_violations) +
             " conservation violations, max conservation error " + detail::fmt(t.worst_conservation);
  if (t.events == 0) r.detail = "no trajectories recorded: run suites 1 and 2 first";
  return r;
}

/// 6. Largest-block marginals of the four constructions.
inline SuiteResult suite_distributional(const SuiteOptions& opt) {
  SuiteResult r{6, "distributional equivalence of four constructions", false, false, "", 0.0, 60.0, {}};
  const double lambda = opt.lambda.value_or(1.0);
  const MassVector m = MassVector::uniform(10);
  const std::vector<double> times{0.1, 0.3};
  const std::size_t reps = 100000;
  const std::uint64_t seed = detail::suite_seed(opt, 6);
  using Pair = std::array<double, 2>;
  const auto mc = run_replicas(reps, seed * 4 + 0, [&](RngStream& rng, std::size_t) {
    const Trajectory tr = simulate(m, lambda, times[1], rng);
    return Pair{state_at(tr, times[0]).largest(), tr.final_state().largest()};
  }, opt.threads);
  const auto ic = run_replicas(reps, seed * 4 + 1, [&](RngStream& rng, std::size_t) {
    const IcldTrajectory tr = icld_simulate(m, lambda, times[1], rng);
    return Pair{sort_desc(tr.state_at(times[0])).largest(), sort_desc(tr.final_state()).largest()};
  }, opt.threads);
  const auto pa = run_replicas(reps, seed * 4 + 2, [&](RngStream& rng, std::size_t) {
    ParticleState s = init(m, lambda, rng);
    s.run(times[0]);
    const double a = sort_desc(blocks(s)).largest();
    s.run(times[1]);
    return Pair{a, sort_desc(blocks(s)).largest()};
  }, opt.threads);
  const auto ts = run_replicas(reps, seed * 4 + 3, [&](RngStream& rng, std::size_t) {
    const StepFunction f0 = from_measure(sample_exp_measure(m, rng));
    const TiltShiftRun a = tilt_shift_run(f0, lambda, times[0]);
    const TiltShiftRun b = tilt_shift_run(f0, lambda, times[1]);
    return Pair{lengths_desc(a.final_state.excursions).largest(), lengths_desc(b.final_state.excursions).largest()};
  }, opt.threads);
  const std::vector<std::pair<std::string, const std::vector<Pair>*>> methods{
      {"markov", &mc}, {"icld", &ic}, {"particles", &pa}, {"tilt-shift", &ts}};
  r.passed = true;
  double min_p = 1.0;
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    std::vector<std::vector<double>> cols;
    for (const auto& [name, v] : methods) {
      std::vector<double> col;
      col.reserve(reps);
      for (const Pair& p : *v) col.push_back(p[ti]);
      cols.push_back(std::move(col));
    }
    for (std::size_t a = 0; a < cols.size(); ++a) {
      for (std::size_t b = a + 1; b < cols.size(); ++b) {
        StatReport rep = ks_two_sample(cols[a], cols[b],
                                       methods[a].first + " vs " + methods[b].first + " t=" + detail::fmt(times[ti]));
        require_p_above(rep, 0.01);
        r.passed = r.passed && rep.passed;
        min_p = std::min(min_p, rep.p_value);
        r.reports.push_back(rep);
      }
    }
  }
  r.detail = std::to_string(r.reports.size()) + " pairwise KS tests at 1e5 replicas each, lambda " +
             detail::fmt(lambda) + ", min p " + detail::fmt(min_p);
  return r;
}

/// 7. Size-biased order of exponential clocks and normalized height gaps.
inline SuiteResult suite_size_biased(const SuiteOptions& opt) {
  SuiteResult r{7, "size-biased order and height gaps", false, false, "", 0.0, 0.0, {}};
  const MassVector m{3, 2, 1};
  const std::size_t reps = 100000;
  RngStream rng(detail::suite_seed(opt, 7), 0);
  std::map<std::vector<double>, double> counts;
  std::vector<double> gaps;
  gaps.reserve(3 * reps);
  for (std::size_t k = 0; k < reps; ++k) {
    const PointMeasure mu = sample_exp_measure(m, rng);
    std::vector<double> order;
    for (const Atom& a : mu) order.push_back(a.mass);
    counts[order] += 1.0;
    // -Y1 ~ Exp(b1 + b2 + b3), Y1 - Y2 ~ Exp(b2 + b3), Y2 - Y3 ~ Exp(b3).
    double above = 0.0;
    double rest = 6.0;
    for (const Atom& a : mu) {
      gaps.push_back((above - a.height) * rest);
      above = a.height;
      rest -= a.mass;
    }
  }
  std::vector<double> perm{1, 2, 3};
  std::vector<double> obs;
  std::vector<double> expected;
  do {
    // P(b1, b2, b3) = b1 / 6 * b2 / (6 - b1).
    expected.push_back(static_cast<double>(reps) * perm[0] / 6.0 * perm[1] / (6.0 - perm[0]));
    obs.push_back(counts[perm]);
  } while (std::next_permutation(perm.begin(), perm.end()));
  StatReport chi = chi_square(obs, expected, "orderings of (3,2,1)");
  require_p_above(chi, 0.01);
  StatReport ks = ks_one_sample(gaps, [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); },
                                "normalized height gaps vs Exp(1)");
  require_p_above(ks, 0.01);
  r.reports = {chi, ks};
  r.passed = chi.passed && ks.passed;
  r.detail = "chi-square p " + detail::fmt(chi.p_value) + " on 6 orderings, gap KS p " + detail::fmt(ks.p_value);
  return r;
}

/// 8. Exponential excursion levels for BMPD(0) and a Levy process without replacement.
inline SuiteResult suite_excursion_levels(const SuiteOptions& opt) {
  SuiteResult r{8, "exponential excursion levels", false, false, "", 0.0, 60.0, {}};
  const double h = 1e-4;
  const double X = 5.0;
  const std::size_t paths = 100;
  const std::vector<std::pair<std::string, LevyParams>> cases{{"BMPD(0)", LevyParams{1.0, 0.0, {}}},
                                                              {"W(1,0,(0.5,0.3))", LevyParams{1.0, 0.0, {0.5, 0.3}}}};
  r.passed = true;
  std::ostringstream det;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto per_path = run_replicas(paths, detail::suite_seed(opt, 8) * 2 + c, [&](RngStream& rng, std::size_t) {
      const GridExcursions g = grid_excursions(sample_levy_wr(cases[c].second, h, X, rng));
      return std::pair{excursion_level_scores(g, 10 * h, kInf), excursion_level_products(g, 10 * h)};
    }, opt.threads);
    std::vector<double> scores;
    std::vector<double> raw;
    for (const auto& [s, p] : per_path) {
      scores.insert(scores.end(), s.begin(), s.end());
      raw.insert(raw.end(), p.begin(), p.end());
    }
    StatReport rep = excursion_levels_test(scores);
    rep.name = cases[c].first + " window-corrected scores vs Uniform(0,1)";
    require_statistic_below(rep, 0.05);
    const StatReport lit = ks_one_sample(raw, [](double z) { return -std::expm1(-z); }, "raw");
    r.passed = r.passed && rep.passed;
    r.reports.push_back(rep);
    det << (c ? "; " : "") << cases[c].first << ": D " << detail::fmt(rep.statistic) << " over " << scores.size()
        << " excursions (uncorrected length*|level| vs Exp(1): D " << detail::fmt(lit.statistic) << ")";
  }
  r.detail = det.str();
  return r;
}

/// 9. Burns of the forest fire form a Poisson process of rate n lambda, by both routes.
inline SuiteResult suite_forest_fire_poisson(const SuiteOptions& opt) {
  SuiteResult r{9, "forest-fire burns are Poisson(n lambda)", false, false, "", 0.0, 0.0, {}};
  if (opt.lambda && *opt.lambda == 0.0) {
    r.skipped = r.passed = true;
    r.detail = "skipped: lambda = 0 has no burns";
    return r;
  }
  const std::size_t n = 100;
  const double lambda = 0.4;
  const double horizon = 50.0;
  const double rate = static_cast<double>(n) * lambda;
  RngStream rng(detail::suite_seed(opt, 9), 0);
  std::vector<double> graph_times;
  const GraphRun gr = evolve(ComponentState::singletons(n, GraphMode::Fire), lambda, horizon, rng, {}, true);
  for (const GraphEvent& e : gr.events) {
    if (e.kind == GraphEventKind::Burn) graph_times.push_back(e.time);
  }
  std::vector<double> particle_times;
  ParticleState ps = init_forest_fire(std::vector<std::size_t>(n, 1), lambda, rng);
  ps.run(horizon, &rng);
  for (const ControlAtom& b : ps.burns()) particle_times.push_back(b.time);
  r.passed = true;
  std::ostringstream det;
  for (const auto& [name, times] : {std::pair{std::string("graph"), &graph_times},
                                    std::pair{std::string("particles"), &particle_times}}) {
    std::vector<double> gaps;
    double prev = 0.0;
    for (double t : *times) {
      gaps.push_back(t - prev);
      prev = t;
    }
    const double mgap = mean(gaps);
    const double rel = std::abs(mgap * rate - 1.0);
    StatReport ks = ks_one_sample(gaps, [&](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); },
                                  name + " inter-burn times vs Exp(n lambda)");
    require_p_above(ks, 0.01);
    const bool ok = ks.passed && rel < 0.05;
    r.passed = r.passed && ok;
    r.reports.push_back(ks);
    det << (name == "graph" ? "" : "; ") << name << ": " << gaps.size() << " burns, mean gap off by "
        << detail::fmt(100.0 * rel) << "%, KS p " << detail::fmt(ks.p_value);
  }
  r.detail = det.str();
  return r;
}

/// 10. Forest-fire densities against the Smoluchowski equations, Burgers residual and boundary value.
inline SuiteResult suite_hydrodynamics(const SuiteOptions& opt) {
  SuiteResult r{10, "Smoluchowski hydrodynamics and Burgers check", false, false, "", 0.0, 300.0, {}};
  if (opt.lambda && *opt.lambda == 0.0) {
    r.skipped = r.passed = true;
    r.detail = "skipped: lambda = 0 has no burns";
    return r;
  }
  const std::size_t n = 10000;
  const double lambda_n = std::pow(static_cast<double>(n), -0.4);
  const std::size_t replicas = 20;
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.05 * i);
  const auto runs = run_replicas(replicas, detail::suite_seed(opt, 10), [&](RngStream& rng, std::size_t) {
    const GraphRun g = evolve(ComponentState::singletons(n, GraphMode::Fire), lambda_n, 1.0, rng, grid);
    std::vector<std::vector<double>> v;
    for (const ComponentState& s : g.samples) v.push_back(densities(s, 5).v);
    return v;
  }, opt.threads);

  SmoluchowskiOptions so;
  so.K = 1000;
  so.dt = 1e-3;
  // Every RK4 step is kept: the Burgers residual is a finite-difference check on these samples.
  const SmoluchowskiRun ode = smoluchowski_solve(DensityTable{0.0, {1.0}}, 2.0, so, 1);
  double sup = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto oi = static_cast<std::size_t>(std::llround(grid[i] / so.dt));
    for (std::size_t k = 0; k < 5; ++k) {
      double avg = 0.0;
      for (const auto& run : runs) avg += run[i][k];
      avg /= static_cast<double>(replicas);
      sup = std::max(sup, std::abs(avg - ode.v[oi][k]));
    }
  }
  const BurgersReport b = burgers_diagnostics(ode);
  r.passed = sup <= 0.05 && b.residual_max < 1e-3 && b.boundary_max <= 1e-9;
  r.reports.push_back(StatReport{"characteristics xi' = V vs xi'' = phi e^-xi", b.characteristic_gap, 1.0, 0, 0,
                                 "reported only", true});
  r.detail = "sup |v_k^n - v_k| over k<=5, t in [0,1]: " + detail::fmt(sup) + " (K=1000, tail at t=1 " +
             detail::fmt(ode.tail[1000]) + "); Burgers residual " + detail::fmt(b.residual_max) + " on t in [" +
             detail::fmt(b.box_t0) + "," + detail::fmt(b.box_t1) + "], x in [" + detail::fmt(b.box_x0) + "," +
             detail::fmt(b.box_x1) + "]; max |V(t,0)| " + detail::fmt(b.boundary_max);
  return r;
}

/// 11. Rescaled frozen percolation against tilt-and-shift of BMPD(0).
inline SuiteResult suite_fp_scaling(const SuiteOptions& opt) {
  SuiteResult r{11, "frozen percolation scaling limit", false, false, "", 0.0, 600.0, {}};
  if (opt.lambda && *opt.lambda == 0.0) {
    r.skipped = r.passed = true;
    r.detail = "skipped: lambda = 0 has no deletions";
    return r;
  }
  const std::size_t n = 50000;
  const double nd = static_cast<double>(n);
  const double lambda = 1.0;
  const double t = 0.5;
  const std::size_t reps = 1000;
  const double time_scale = std::cbrt(1.0 / nd);
  const double mass_scale = std::pow(nd, -2.0 / 3.0);
  const auto graph = run_replicas(reps, detail::suite_seed(opt, 11) * 2, [&](RngStream& rng, std::size_t) {
    const ComponentState s0 = sample_er_critical(n, 0.0, rng, GraphMode::Frozen);
    const GraphRun run = evolve(s0, lambda * time_scale, t * time_scale, rng);
    return mass_scale * static_cast<double>(run.final_state.largest());
  }, opt.threads);
  const auto bm = run_replicas(reps, detail::suite_seed(opt, 11) * 2 + 1, [&](RngStream& rng, std::size_t) {
    const BmpdTiltShift b = bmpd_tilt_shift(0.0, lambda, 1e-3, 10.0, t, rng, 2);
    return top_lengths(b.final_excursions, 1)[0];
  }, opt.threads);
  StatReport ks = ks_two_sample(graph, bm, "rescaled largest FP component vs BMPD tilt-and-shift");
  require_statistic_below(ks, 0.1 + 1e-12);
  ks.threshold = "statistic <= 0.1";
  r.reports.push_back(ks);
  r.passed = ks.statistic <= 0.1;
  r.detail = "KS statistic " + detail::fmt(ks.statistic) + " (p " + detail::fmt(ks.p_value) + "), means " +
             detail::fmt(mean(graph)) + " vs " + detail::fmt(mean(bm));
  return r;
}

/// 12. Successive-difference contraction of Phi^(n)(t) for truncations of m_i = i^-0.6.
inline SuiteResult suite_truncation(const SuiteOptions& opt) {
  SuiteResult r{12, "truncation convergence", false, false, "", 0.0, 0.0, {}};
  if (opt.lambda && *opt.lambda == 0.0) {
    r.skipped = r.passed = true;
    r.detail = "skipped: lambda = 0 has no deletions";
    return r;
  }
  const std::vector<std::size_t> grid{50, 100, 200, 400, 800};
  const auto rows = run_replicas(100, detail::suite_seed(opt, 12), [&](RngStream& rng, std::size_t) {
    return truncation_convergence(0.6, 1.0, 0.5, grid, rng);
  }, opt.threads);
  std::size_t contracted = 0;
  std::size_t both_zero = 0;
  for (const auto& row : rows) {
    const double late = std::abs(row[4].phi - row[3].phi);
    const double early = std::abs(row[2].phi - row[1].phi);
    contracted += late < early;
    both_zero += late == 0.0 && early == 0.0;
  }
  r.passed = contracted >= 90;
  r.detail = std::to_string(contracted) + "/100 replicas with |Phi800 - Phi400| < |Phi200 - Phi100| (" +
             std::to_string(both_zero) + " with both differences zero)";
  return r;
}

/// 13. Window process: post-shift excursions against fresh BMPD(u + t - Phi(t)) at matched Phi.
inline SuiteResult suite_window_process(const SuiteOptions& opt) {
  SuiteResult r{13, "window process", false, false, "", 0.0, 0.0, {}};
  if (opt.lambda && *opt.lambda == 0.0) {
    r.skipped = r.passed = true;
    r.detail = "skipped: lambda = 0 has no deletions";
    return r;
  }
  const double u = 0.0;
  const double lambda = 1.0;
  const double t = 0.5;
  const double h = 1e-3;
  const double X = 10.0;
  using Row = std::array<double, 5>;
  const auto rows = run_replicas(10000, detail::suite_seed(opt, 13), [&](RngStream& rng, std::size_t) {
    const BmpdTiltShift b = bmpd_tilt_shift(u, lambda, h, X, t, rng, 2);
    const double w = b.window.empty() ? u + t : b.window.back();
    const auto shifted = top_lengths(b.final_excursions, 2);
    const auto fresh = top_lengths(grid_excursions(sample_bmpd(w, h, X, rng)).completed, 2);
    return Row{shifted[0], shifted[1], fresh[0], fresh[1], w};
  }, opt.threads);
  std::vector<double> a1, a2, f1, f2, phi;
  for (const Row& row : rows) {
    a1.push_back(row[0]);
    a2.push_back(row[1]);
    f1.push_back(row[2]);
    f2.push_back(row[3]);
    phi.push_back(u + t - row[4]);
  }
  StatReport k1 = ks_two_sample(a1, f1, "largest excursion: shifted vs fresh BMPD(u+t-Phi)");
  StatReport k2 = ks_two_sample(a2, f2, "second largest excursion: shifted vs fresh BMPD(u+t-Phi)");
  require_p_above(k1, 0.01);
  require_p_above(k2, 0.01);
  r.reports = {k1, k2};
  r.passed = k1.passed && k2.passed;
  r.detail = "10^4 replicas, mean Phi(t) " + detail::fmt(mean(phi)) + ", largest p " + detail::fmt(k1.p_value) +
             ", second p " + detail::fmt(k2.p_value);
  return r;
}

// ---------------------------------------------------------------------------

using SuiteFn = SuiteResult (*)(const SuiteOptions&);

inline const std::vector<SuiteFn>& suite_table() {
  static const std::vector<SuiteFn> table{
      suite_exact_coupling,  suite_recursive_death_times, suite_kernel_identity, suite_insertion_bound,
      suite_invariants,      suite_distributional,        suite_size_biased,     suite_excursion_levels,
      suite_forest_fire_poisson, suite_hydrodynamics,     suite_fp_scaling,      suite_truncation,
      suite_window_process};
  return table;
}

/// Run one suite, timing it and failing it when it exceeds its runtime limit.
inline SuiteResult run_suite(int id, const SuiteOptions& opt) {
  if (id < 1 || id > kSuiteCount) throw std::invalid_argument("run_suite: no suite " + std::to_string(id));
  const auto start = std::chrono::steady_clock::now();
  SuiteResult r;
  try {
    r = suite_table()[static_cast<std::size_t>(id - 1)](opt);
  } catch (const std::exception& e) {
    r.id = id;
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (r.time_limit > 0.0 && r.seconds > r.time_limit && !r.skipped) {
    r.passed = false;
    r.detail += "; runtime " + detail::fmt(r.seconds) + " s exceeds " + detail::fmt(r.time_limit) + " s";
  }
  return r;
}

/// Suites 1 and 2 feed suite 5, so selections containing 5 pull them in.
inline std::vector<SuiteResult> run_suites(const std::set<int>& ids, const SuiteOptions& opt) {
  detail::invariant_tally() = detail::InvariantTally{};
  std::set<int> todo = ids;
  if (todo.count(5)) {
    todo.insert(1);
    todo.insert(2);
  }
  std::vector<SuiteResult> out;
  for (int id : todo) out.push_back(run_suite(id, opt));
  return out;
}

/// One "PASS|FAIL|SKIP criterion N: ..." line followed by one indented line per statistic.
inline std::string format_suite_result(const SuiteResult& r) {
  auto secs = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return std::string(buf);
  };
  std::ostringstream os;
  os << (r.skipped ? "SKIP" : r.passed ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.name << ": "
     << r.detail << " [" << secs(r.seconds) << " s";
  if (r.time_limit > 0.0) os << ", limit " << detail::fmt(r.time_limit) << " s";
  os << "]\n";
  for (const StatReport& s : r.reports) {
    os << "    " << s.name << ": statistic " << detail::fmt(s.statistic) << ", p " << detail::fmt(s.p_value) << ", n "
       << s.n1 << "/" << s.n2 << ", " << s.threshold << "\n";
  }
  return os.str();
}

}  // namespace mcld
