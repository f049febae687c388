#pragma once

// Rigid particle representation. Particles start at negative heights and rise:
// a particle at height y < 0 moves at speed lambda + (alive mass strictly
// between y and 0). Particles that meet stick together into a block; a block
// that reaches 0 dies (or burns, in forest-fire mode). All randomness is in the
// initial heights, so the evolution here is deterministic and piecewise linear.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mcld/control.hpp"
#include "mcld/core.hpp"
#include "mcld/error.hpp"
#include "mcld/rng.hpp"

namespace mcld {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ParticleMode { Mcld, ForestFire, Threshold };

struct ModeSpec {
  ParticleMode kind = ParticleMode::Mcld;
  std::size_t n = 0;      ///< forest fire: number of particles (each of mass 1/n)
  double omega = kInf;    ///< threshold: blocks heavier than omega are removed

  static ModeSpec mcld() { return {}; }
  static ModeSpec forest_fire(std::size_t n) { return {ParticleMode::ForestFire, n, kInf}; }
  static ModeSpec threshold(double omega) { return {ParticleMode::Threshold, 0, omega}; }
};

struct Particle {
  double mass;
  double height;
  bool alive;
};

enum class ParticleEventKind { BlockMerge, BlockDeath, Burn, Freeze };

inline const char* to_string(ParticleEventKind k) {
  switch (k) {
    case ParticleEventKind::BlockMerge: return "merge";
    case ParticleEventKind::BlockDeath: return "death";
    case ParticleEventKind::Burn: return "burn";
    case ParticleEventKind::Freeze: return "freeze";
  }
  return "?";
}

struct ParticleEvent {
  double time = 0.0;
  ParticleEventKind kind = ParticleEventKind::BlockMerge;
  /// Merge: upper block index k (merged with k+1). Death/burn: 0. Freeze: index of the removed block.
  std::size_t k = 0;
  /// Mass of the block that merged into, died, burned or froze.
  double mass = 0.0;
  /// Freeze only: whether the freeze followed a merge at the same instant.
  bool after_merge = false;
};

/// Candidate times (absolute) of the next death and of each adjacent-gap closing.
struct EventSchedule {
  double death_time = kInf;
  std::vector<double> merge_times;  ///< merge_times[k]: blocks k and k+1 meet

  /// Earliest event; deaths win ties, then the lowest k. Returns {time, -1} for a death.
  std::pair<double, long> earliest() const {
    double best = death_time;
    long which = -1;
    for (std::size_t k = 0; k < merge_times.size(); ++k) {
      if (merge_times[k] < best) {
        best = merge_times[k];
        which = static_cast<long>(k);
      }
    }
    return {best, which};
  }
};

/// One piece of a particle's height path: from time t0 at height y0 with the given slope,
/// until the next segment of the same particle, its death at 0, or the end of the run.
struct Segment {
  std::size_t id;
  double t0;
  double y0;
  double slope;
};

class ParticleState {
 public:
  struct Block {
    double height;
    double mass;
    std::vector<std::size_t> members;
  };

  /// Particles with explicit initial heights (all < 0). Equal heights start as one block.
  ParticleState(std::vector<double> masses, std::vector<double> heights, double lambda,
                ModeSpec mode = ModeSpec::mcld())
      : lambda_(lambda), mode_(mode) {
    if (masses.size() != heights.size()) throw std::invalid_argument("ParticleState: size mismatch");
    if (lambda < 0.0 || !std::isfinite(lambda)) throw std::invalid_argument("ParticleState: lambda must be >= 0");
    detail::check_positive(masses, "ParticleState masses");
    if (mode_.kind == ParticleMode::ForestFire && mode_.n == 0) mode_.n = masses.size();
    particles_.resize(masses.size());
    death_time_.assign(masses.size(), kInf);
    std::vector<std::size_t> idx(masses.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < masses.size(); ++i) {
      if (!(heights[i] < 0.0)) throw std::invalid_argument("ParticleState: heights must be < 0");
      particles_[i] = Particle{masses[i], heights[i], true};
    }
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return heights[a] > heights[b]; });
    for (std::size_t i : idx) {
      if (!blocks_.empty() && blocks_.back().height == heights[i]) {
        blocks_.back().mass += masses[i];
        blocks_.back().members.push_back(i);
      } else {
        blocks_.push_back(Block{heights[i], masses[i], {i}});
      }
    }
    initial_total_ = 0.0;
    for (double m : masses) initial_total_ += m;
    if (mode_.kind == ParticleMode::Threshold) {
      for (std::size_t k = 0; k < blocks_.size();) {
        if (blocks_[k].mass > mode_.omega) {
          freeze_block(k);
        } else {
          ++k;
        }
      }
    }
  }

  double time() const noexcept { return time_; }
  double lambda() const noexcept { return lambda_; }
  const ModeSpec& mode() const noexcept { return mode_; }
  const std::vector<Block>& block_list() const noexcept { return blocks_; }
  const ControlMeasure& control() const noexcept { return control_; }
  /// Forest fire: (time, burned mass) per burn.
  const std::vector<ControlAtom>& burns() const noexcept { return burns_; }
  double frozen_mass() const noexcept { return frozen_mass_; }
  double initial_total() const noexcept { return initial_total_; }
  std::size_t particle_count() const noexcept { return particles_.size(); }

  /// Death time of each particle (infinity while alive). Forest fire: most recent burn.
  const std::vector<double>& death_times() const noexcept { return death_time_; }

  double alive_mass() const noexcept {
    double s = 0.0;
    for (const Block& b : blocks_) s += b.mass;
    return s;
  }

  /// Current particles with heights brought up to time().
  std::vector<Particle> particles() const {
    std::vector<Particle> out = particles_;
    for (Particle& p : out) p.alive = false;
    for (const Block& b : blocks_) {
      for (std::size_t i : b.members) {
        out[i].height = b.height;
        out[i].alive = true;
      }
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (!out[i].alive) out[i].height = 0.0;
    }
    return out;
  }

  /// Speed of block k: lambda plus the alive mass above it.
  double block_speed(std::size_t k) const {
    double s = lambda_;
    for (std::size_t j = 0; j < k; ++j) s += blocks_[j].mass;
    return s;
  }

  EventSchedule next_event() const {
    EventSchedule sch;
    if (blocks_.empty() || (lambda_ == 0.0 && blocks_.size() == 1)) throw NoFurtherEvent();
    if (lambda_ > 0.0) sch.death_time = time_ + std::max(0.0, -blocks_[0].height / lambda_);
    sch.merge_times.resize(blocks_.size() - 1);
    for (std::size_t k = 0; k + 1 < blocks_.size(); ++k) {
      const double gap = blocks_[k].height - blocks_[k + 1].height;
      sch.merge_times[k] = time_ + std::max(0.0, gap / blocks_[k].mass);
    }
    return sch;
  }

  bool has_next_event() const noexcept {
    return !blocks_.empty() && (lambda_ > 0.0 || blocks_.size() > 1);
  }

  /// Move every block linearly to time t; t must not pass the next event.
  void advance_to(double t) {
    if (t < time_) throw std::invalid_argument("advance_to: time went backwards");
    const double dt = t - time_;
    double above = 0.0;
    for (Block& b : blocks_) {
      b.height += (lambda_ + above) * dt;
      above += b.mass;
    }
    time_ = t;
  }

  /// Process the next event. Forest-fire re-insertion draws from `rng`.
  ParticleEvent advance(RngStream* rng = nullptr) {
    const EventSchedule sch = next_event();
    const auto [t, which] = sch.earliest();
    advance_to(t);
    ParticleEvent ev;
    ev.time = t;
    if (which < 0) {
      Block top = std::move(blocks_.front());
      blocks_.erase(blocks_.begin());
      ev.k = 0;
      ev.mass = top.mass;
      for (std::size_t i : top.members) death_time_[i] = t;
      if (mode_.kind == ParticleMode::ForestFire) {
        if (!rng) throw std::invalid_argument("advance: forest-fire mode needs an RngStream");
        ev.kind = ParticleEventKind::Burn;
        burns_.push_back(ControlAtom{t, top.mass});
        for (std::size_t i : top.members) insert_block(-rng->exponential(1.0), {i});
        forget_slopes(top.members);
      } else {
        ev.kind = ParticleEventKind::BlockDeath;
        control_.push(t, top.mass);
        forget_slopes(top.members);
      }
    } else {
      const auto k = static_cast<std::size_t>(which);
      Block& up = blocks_[k];
      Block& low = blocks_[k + 1];
      up.mass += low.mass;
      up.members.insert(up.members.end(), low.members.begin(), low.members.end());
      blocks_.erase(blocks_.begin() + static_cast<std::ptrdiff_t>(k + 1));
      ev.kind = ParticleEventKind::BlockMerge;
      ev.k = k;
      ev.mass = blocks_[k].mass;
      if (mode_.kind == ParticleMode::Threshold && blocks_[k].mass > mode_.omega) {
        freeze_block(k);
        ev.kind = ParticleEventKind::Freeze;
        ev.after_merge = true;
      }
    }
    record_segments();
    return ev;
  }

  /// Run events up to `horizon` and stop there. Returns the processed events.
  std::vector<ParticleEvent> run(double horizon, RngStream* rng = nullptr) {
    std::vector<ParticleEvent> out;
    while (has_next_event()) {
      if (next_event().earliest().first > horizon) break;
      out.push_back(advance(rng));
    }
    if (horizon > time_ && std::isfinite(horizon)) advance_to(horizon);
    return out;
  }

  /// Turn on per-particle path recording from the current time.
  void record_paths() {
    recording_ = true;
    last_slope_.assign(particles_.size(), std::numeric_limits<double>::quiet_NaN());
    record_segments();
  }

  const std::vector<Segment>& segments() const noexcept { return segments_; }

 private:
  void insert_block(double height, std::vector<std::size_t> members) {
    double mass = 0.0;
    for (std::size_t i : members) mass += particles_[i].mass;
    auto it = std::find_if(blocks_.begin(), blocks_.end(), [&](const Block& b) { return b.height <= height; });
    if (it != blocks_.end() && it->height == height) {
      it->mass += mass;
      it->members.insert(it->members.end(), members.begin(), members.end());
    } else {
      blocks_.insert(it, Block{height, mass, std::move(members)});
    }
  }

  void freeze_block(std::size_t k) {
    frozen_mass_ += blocks_[k].mass;
    for (std::size_t i : blocks_[k].members) death_time_[i] = time_;
    forget_slopes(blocks_[k].members);
    blocks_.erase(blocks_.begin() + static_cast<std::ptrdiff_t>(k));
  }

  // Forces a fresh segment row the next time these particles are seen alive.
  void forget_slopes(const std::vector<std::size_t>& members) {
    if (!recording_) return;
    for (std::size_t i : members) last_slope_[i] = std::numeric_limits<double>::quiet_NaN();
  }

  void record_segments() {
    if (!recording_) return;
    double above = 0.0;
    for (const Block& b : blocks_) {
      const double slope = lambda_ + above;
      for (std::size_t i : b.members) {
        if (!(last_slope_[i] == slope)) {
          segments_.push_back(Segment{i, time_, b.height, slope});
          last_slope_[i] = slope;
        }
      }
      above += b.mass;
    }
  }

  double time_ = 0.0;
  double lambda_;
  ModeSpec mode_;
  std::vector<Particle> particles_;
  std::vector<Block> blocks_;
  std::vector<double> death_time_;
  ControlMeasure control_;
  std::vector<ControlAtom> burns_;
  double frozen_mass_ = 0.0;
  double initial_total_ = 0.0;
  bool recording_ = false;
  std::vector<double> last_slope_;
  std::vector<Segment> segments_;
};

/// Particles of masses m at heights -E_i with independent E_i ~ Exp(m_i).
inline ParticleState init(const MassVector& m, double lambda, RngStream& rng) {
  if (m.empty()) throw std::invalid_argument("init: empty mass vector");
  const PointMeasure mu = sample_exp_measure(m, rng);
  std::vector<double> masses;
  std::vector<double> heights;
  for (const Atom& a : mu) {
    masses.push_back(a.mass);
    heights.push_back(a.height);
  }
  return ParticleState(std::move(masses), std::move(heights), lambda);
}

/// Same, reusing given exponential draws (exps[i] belongs to m[i]); particle i is block m[i].
inline ParticleState init_from_exponentials(const MassVector& m, std::span<const double> exps, double lambda,
                                            ModeSpec mode = ModeSpec::mcld()) {
  const PointMeasure mu = exp_measure_from(m, exps);
  std::vector<double> masses;
  std::vector<double> heights;
  for (const Atom& a : mu) {
    masses.push_back(a.mass);
    heights.push_back(a.height);
  }
  return ParticleState(std::move(masses), std::move(heights), lambda, mode);
}

/// Forest-fire particle system: n particles of mass 1/n; the particles of an
/// initial component of integer size k share one height -E with E ~ Exp(k).
inline ParticleState init_forest_fire(const std::vector<std::size_t>& component_sizes, double lambda_n,
                                      RngStream& rng) {
  std::size_t n = 0;
  for (std::size_t k : component_sizes) {
    if (k == 0) throw std::invalid_argument("init_forest_fire: component sizes must be >= 1");
    n += k;
  }
  if (n == 0) throw std::invalid_argument("init_forest_fire: no particles");
  std::vector<double> masses(n, 1.0 / static_cast<double>(n));
  std::vector<double> heights;
  heights.reserve(n);
  for (std::size_t k : component_sizes) {
    const double h = -rng.exponential(static_cast<double>(k));
    for (std::size_t r = 0; r < k; ++r) heights.push_back(h);
  }
  return ParticleState(std::move(masses), std::move(heights), lambda_n, ModeSpec::forest_fire(n));
}

/// Block masses ordered from highest to lowest.
inline OrderedBlocks blocks(const ParticleState& s) {
  std::vector<double> v;
  for (const auto& b : s.block_list()) v.push_back(b.mass);
  return OrderedBlocks(std::move(v));
}

/// One atom per block: (block height, block mass).
inline PointMeasure to_measure(const ParticleState& s) {
  std::vector<Atom> atoms;
  for (const auto& b : s.block_list()) atoms.push_back(Atom{b.height, b.mass});
  return PointMeasure(std::move(atoms));
}

inline EventSchedule next_event(const ParticleState& s) { return s.next_event(); }

inline std::pair<ParticleState, ParticleEvent> advance(ParticleState s, RngStream* rng = nullptr) {
  ParticleEvent ev = s.advance(rng);
  return {std::move(s), ev};
}

/// Closed-form death times: with particles relabelled by decreasing height,
/// t_i = max(t_{i-1}, (|Y_i(0)| - sum_{j<i} m_j t_j) / lambda). Returned in input order.
inline std::vector<double> death_times_recursive(std::span<const double> masses, std::span<const double> heights,
                                                 double lambda) {
  if (!(lambda > 0.0)) throw LambdaZero();
  if (masses.size() != heights.size()) throw std::invalid_argument("death_times_recursive: size mismatch");
  std::vector<std::size_t> idx(masses.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return heights[a] > heights[b]; });
  std::vector<double> t(masses.size());
  double prev = 0.0;
  double weighted = 0.0;
  for (std::size_t i : idx) {
    const double ti = std::max(prev, (-heights[i] - weighted) / lambda);
    t[i] = ti;
    weighted += masses[i] * ti;
    prev = ti;
  }
  return t;
}

inline std::vector<double> death_times_recursive(const ParticleState& s0) {
  std::vector<double> masses;
  std::vector<double> heights;
  for (const Particle& p : s0.particles()) {
    masses.push_back(p.mass);
    heights.push_back(p.height);
  }
  return death_times_recursive(masses, heights, s0.lambda());
}

struct InsertionReport {
  std::vector<double> old_times;  ///< death times of the original particles
  std::vector<double> new_times;  ///< same particles after the insertion
  std::vector<double> bounds;     ///< upper bound on |new - old| per particle
  bool within_bound = true;       ///< every |new - old| <= bound (up to 1e-12 relative rounding)
};

/// Effect of adding one particle at time 0 on the death times of the others.
///
/// For particle i the bound is 1[inserted height > Y_i] * mass * |Y_i| / lambda^2
/// * exp(mu_0(Y_i, 0) / lambda), where mu_0(Y_i, 0) is the original mass strictly above Y_i.
inline InsertionReport insert_particle(const ParticleState& s0, double mass, double height) {
  if (s0.time() != 0.0) throw std::invalid_argument("insert_particle: state must be at time 0");
  if (s0.mode().kind != ParticleMode::Mcld) throw std::invalid_argument("insert_particle: Mcld mode only");
  if (!(s0.lambda() > 0.0)) throw LambdaZero();
  if (!(mass > 0.0) || !(height < 0.0)) throw std::invalid_argument("insert_particle: need mass > 0, height < 0");
  const double lambda = s0.lambda();
  std::vector<double> masses;
  std::vector<double> heights;
  for (const Particle& p : s0.particles()) {
    masses.push_back(p.mass);
    heights.push_back(p.height);
  }
  InsertionReport rep;
  rep.old_times = death_times_recursive(masses, heights, lambda);
  masses.push_back(mass);
  heights.push_back(height);
  rep.new_times = death_times_recursive(masses, heights, lambda);
  rep.new_times.pop_back();
  masses.pop_back();
  heights.pop_back();
  const PointMeasure mu0 = to_measure(s0);
  rep.bounds.resize(heights.size());
  for (std::size_t i = 0; i < heights.size(); ++i) {
    const double y = heights[i];
    rep.bounds[i] = height > y ? mass * -y / (lambda * lambda) * std::exp(mu0.mass_above(y) / lambda) : 0.0;
    const double diff = std::abs(rep.new_times[i] - rep.old_times[i]);
    if (diff > rep.bounds[i] + 1e-12 * std::max(1.0, rep.old_times[i])) rep.within_bound = false;
  }
  return rep;
}

}  // namespace mcld
