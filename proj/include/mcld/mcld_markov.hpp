#pragma once

// Direct jump-chain simulation of the multiplicative coalescent with linear
// deletion: blocks i, j merge at rate m_i m_j, block i is deleted at rate lambda m_i.

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mcld/core.hpp"
#include "mcld/error.hpp"
#include "mcld/rng.hpp"

namespace mcld {

/// Horizon meaning "run until the chain is absorbed".
inline constexpr double kUntilAbsorption = 1e300;

enum class EventKind { Merge, Delete };

inline const char* to_string(EventKind k) { return k == EventKind::Merge ? "merge" : "delete"; }

struct McldEvent {
  double time = 0.0;
  EventKind kind = EventKind::Merge;
  std::size_t i = 0;  ///< merged or deleted block (index into the pre-event state)
  std::size_t j = 0;  ///< second merged block; unused for deletions
  MassVector state_after;
};

template <class State>
struct BasicTrajectory {
  State initial;
  std::vector<McldEvent> events;
  std::vector<State> states;  ///< states[k] is the state after events[k]
  double horizon = 0.0;

  std::size_t size() const noexcept { return events.size(); }

  const State& final_state() const { return states.empty() ? initial : states.back(); }

  /// Right-continuous evaluation.
  const State& state_at(double t) const {
    if (!(t >= 0.0) || t > horizon) throw OutOfHorizon(t);
    std::size_t k = 0;
    while (k < events.size() && events[k].time <= t) ++k;
    return k == 0 ? initial : states[k - 1];
  }
};

using Trajectory = BasicTrajectory<MassVector>;

/// lambda * sum m_i + sum_{i<j} m_i m_j.
inline double total_rate(const MassVector& m, double lambda) {
  double s = 0.0;
  double pairs = 0.0;
  for (double x : m) {
    pairs += s * x;
    s += x;
  }
  return lambda * s + pairs;
}

inline MassVector apply_merge(const MassVector& m, std::size_t i, std::size_t j) {
  std::vector<double> v;
  v.reserve(m.size() - 1);
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (k != i && k != j) v.push_back(m[k]);
  }
  v.push_back(m[i] + m[j]);
  return sort_desc(std::move(v));
}

inline MassVector apply_delete(const MassVector& m, std::size_t i) {
  std::vector<double> v;
  v.reserve(m.size() - 1);
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (k != i) v.push_back(m[k]);
  }
  return MassVector(std::move(v));
}

/// One jump. The event is picked by a single uniform against the cumulative
/// rate list: deletions of blocks 0..n-1 first, then merges (i, j), i < j, in
/// lexicographic order. The returned event's time is `dt`.
inline std::pair<double, McldEvent> step(const MassVector& m, double lambda, RngStream& rng) {
  if (lambda < 0.0) throw std::invalid_argument("step: lambda must be >= 0");
  const double total = total_rate(m, lambda);
  if (!(total > 0.0)) throw AbsorbedState();
  const double dt = rng.exponential(total);
  const double target = rng.uniform() * total;

  McldEvent ev;
  ev.time = dt;
  double acc = 0.0;
  const std::size_t n = m.size();
  if (lambda > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      acc += lambda * m[i];
      if (target < acc) {
        ev.kind = EventKind::Delete;
        ev.i = i;
        ev.state_after = apply_delete(m, i);
        return {dt, std::move(ev)};
      }
    }
  }
  std::size_t last_i = 0;
  std::size_t last_j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      acc += m[i] * m[j];
      last_i = i;
      last_j = j;
      if (target < acc) {
        ev.kind = EventKind::Merge;
        ev.i = i;
        ev.j = j;
        ev.state_after = apply_merge(m, i, j);
        return {dt, std::move(ev)};
      }
    }
  }
  // Rounding left target just above the accumulated sum: take the last event.
  if (n >= 2) {
    ev.kind = EventKind::Merge;
    ev.i = last_i;
    ev.j = last_j;
    ev.state_after = apply_merge(m, last_i, last_j);
  } else {
    ev.kind = EventKind::Delete;
    ev.i = 0;
    ev.state_after = apply_delete(m, 0);
  }
  return {dt, std::move(ev)};
}

inline Trajectory simulate(const MassVector& m0, double lambda, double horizon, RngStream& rng) {
  if (!(horizon >= 0.0)) throw std::invalid_argument("simulate: horizon must be >= 0");
  Trajectory traj;
  traj.initial = m0;
  traj.horizon = horizon;
  MassVector cur = m0;
  double t = 0.0;
  while (total_rate(cur, lambda) > 0.0) {
    auto [dt, ev] = step(cur, lambda, rng);
    if (t + dt > horizon) break;
    t += dt;
    ev.time = t;
    cur = ev.state_after;
    traj.states.push_back(cur);
    traj.events.push_back(std::move(ev));
  }
  return traj;
}

inline MassVector state_at(const Trajectory& traj, double t) { return traj.state_at(t); }

/// Total rate of jumping from m directly to m2 (all merge pairs and deletions
/// whose sorted result equals m2).
inline double mc_rate(const MassVector& m, const MassVector& m2, double lambda) {
  if (m2.size() + 1 != m.size()) return 0.0;
  double r = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (lambda > 0.0 && apply_delete(m, i) == m2) r += lambda * m[i];
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      if (apply_merge(m, i, j) == m2) r += m[i] * m[j];
    }
  }
  return r;
}

}  // namespace mcld
