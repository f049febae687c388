#pragma once

// Step functions, excursions above the running minimum, tilting, and the
// tilt-and-shift evolution.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mcld/control.hpp"
#include "mcld/core.hpp"
#include "mcld/error.hpp"
#include "mcld/particle_system.hpp"
#include "mcld/rng.hpp"

namespace mcld {

/// Piecewise-constant function on [0, total): value y[k] on [x[k], x[k+1]),
/// with x.back() followed by `total`; -infinity from `total` on.
class StepFunction {
 public:
  StepFunction() = default;
  StepFunction(std::vector<double> x, std::vector<double> y, double total)
      : x_(std::move(x)), y_(std::move(y)), total_(total) {
    if (x_.size() != y_.size()) throw std::invalid_argument("StepFunction: size mismatch");
    if (!x_.empty() && x_.front() != 0.0) throw std::invalid_argument("StepFunction: first breakpoint must be 0");
    for (std::size_t k = 0; k < x_.size(); ++k) {
      const double next = k + 1 < x_.size() ? x_[k + 1] : total_;
      if (!(next > x_[k])) throw std::invalid_argument("StepFunction: segment lengths must be positive");
    }
    if (x_.empty() && total_ != 0.0) throw std::invalid_argument("StepFunction: empty function has total 0");
  }

  /// Build from (length, value) segments laid out left to right.
  static StepFunction from_segments(std::span<const double> lengths, std::span<const double> values) {
    if (lengths.size() != values.size()) throw std::invalid_argument("from_segments: size mismatch");
    std::vector<double> x;
    double pos = 0.0;
    for (double len : lengths) {
      x.push_back(pos);
      pos += len;
    }
    return StepFunction(std::move(x), std::vector<double>(values.begin(), values.end()), pos);
  }

  std::size_t size() const noexcept { return x_.size(); }
  bool empty() const noexcept { return x_.empty(); }
  double total() const noexcept { return total_; }
  const std::vector<double>& breakpoints() const noexcept { return x_; }
  const std::vector<double>& values() const noexcept { return y_; }
  double length(std::size_t k) const { return (k + 1 < x_.size() ? x_[k + 1] : total_) - x_[k]; }

  double operator()(double x) const {
    if (x < 0.0) throw std::invalid_argument("StepFunction: x must be >= 0");
    if (x >= total_) return -std::numeric_limits<double>::infinity();
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    return y_[static_cast<std::size_t>(it - x_.begin()) - 1];
  }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  double total_ = 0.0;
};

struct Excursion {
  double left;
  double length;
  double level;

  friend bool operator==(const Excursion&, const Excursion&) = default;
};

using ExcursionList = std::vector<Excursion>;

/// Excursion lengths in non-increasing order.
inline MassVector lengths_desc(const ExcursionList& ex) {
  std::vector<double> v;
  for (const Excursion& e : ex) v.push_back(e.length);
  return sort_desc(std::move(v));
}

/// Excursion lengths in order of appearance.
inline OrderedBlocks lengths_in_order(const ExcursionList& ex) {
  std::vector<double> v;
  for (const Excursion& e : ex) v.push_back(e.length);
  return OrderedBlocks(std::move(v));
}

/// Inverse-cdf step function of a point measure: the atom at height -E with
/// mass m becomes a segment of length m and value -E, highest atoms first.
inline StepFunction from_measure(const PointMeasure& mu) {
  if (mu.empty()) throw std::invalid_argument("from_measure: empty measure");
  std::vector<double> len;
  std::vector<double> val;
  for (const Atom& a : mu) {
    len.push_back(a.mass);
    val.push_back(a.height);
  }
  return StepFunction::from_segments(len, val);
}

namespace detail {

// Excursions of x -> f(x) + t x; a segment starts an excursion iff its tilted
// left value is a strict running-minimum record.
inline ExcursionList tilted_records(const StepFunction& f, double t) {
  ExcursionList out;
  const auto& x = f.breakpoints();
  const auto& y = f.values();
  double record = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double v = y[k] + t * x[k];
    const double tol = std::isfinite(record) ? 1e-12 * std::max(1.0, std::abs(record)) : 0.0;
    if (v < record - tol) {
      if (!out.empty()) out.back().length = x[k] - out.back().left;
      out.push_back(Excursion{x[k], 0.0, v});
      record = v;
    }
  }
  if (!out.empty()) out.back().length = f.total() - out.back().left;
  return out;
}

}  // namespace detail

inline ExcursionList excursions(const StepFunction& f) { return detail::tilted_records(f, 0.0); }

/// Excursions of f_t(x) = f0(x) + t x, computed exactly from the breakpoints.
inline ExcursionList tilt_excursions(const StepFunction& f0, double t) {
  if (t < 0.0) throw std::invalid_argument("tilt_excursions: t must be >= 0");
  return detail::tilted_records(f0, t);
}

enum class TiltShiftEventKind { Merge, Shift };

struct TiltShiftEvent {
  double time;
  TiltShiftEventKind kind;
  std::size_t k;  ///< merge: index of the left excursion of the merged pair; shift: 0
  double mass;    ///< merge: merged length; shift: deleted length
};

/// Snapshot of the running-minimum profile right after an event.
struct TiltShiftState {
  double time = 0.0;
  double phi = 0.0;
  ExcursionList excursions;  ///< current coordinates (after shifting), levels at `time`

  /// The profile as a step function (value = excursion level on each excursion).
  StepFunction profile() const {
    std::vector<double> len;
    std::vector<double> val;
    for (const Excursion& e : excursions) {
      len.push_back(e.length);
      val.push_back(e.level);
    }
    return StepFunction::from_segments(len, val);
  }
};

struct TiltShiftRun {
  std::vector<TiltShiftEvent> events;
  std::vector<TiltShiftState> states;  ///< initial state, then one per event (when recorded)
  ControlMeasure control;
  TiltShiftState final_state;
};

/// Event-driven tilt-and-shift of a step function.
///
/// Each excursion is tracked by its original left coordinate a and original
/// level c = f0(a). Its current level is c + (a + lambda) t - int_0^t Phi, so two
/// neighbours merge at the time their levels meet, whatever the shifts; the first
/// excursion rises at rate lambda and is deleted when its level reaches 0.
/// Simultaneous events: the deletion goes first, then merges from the left.
inline TiltShiftRun tilt_shift_run(const StepFunction& f0, double lambda, double horizon,
                                   bool record_states = false) {
  if (lambda < 0.0) throw std::invalid_argument("tilt_shift_run: lambda must be >= 0");
  struct Node {
    double a;
    double c;
    double length;
    std::size_t prev;
    std::size_t next;
    bool alive;
    unsigned version;
  };
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  const ExcursionList ex0 = excursions(f0);
  std::vector<Node> nodes;
  nodes.reserve(ex0.size());
  for (std::size_t k = 0; k < ex0.size(); ++k) {
    nodes.push_back(Node{ex0[k].left, ex0[k].level, ex0[k].length, k == 0 ? kNone : k - 1,
                         k + 1 < ex0.size() ? k + 1 : kNone, true, 0});
  }
  std::size_t head = nodes.empty() ? kNone : 0;

  struct Candidate {
    double time;
    std::size_t left;
    unsigned left_version;
    unsigned right_version;
    std::size_t right;
    bool operator>(const Candidate& o) const {
      if (time != o.time) return time > o.time;
      return nodes_order > o.nodes_order;
    }
    double nodes_order;  // original coordinate of the left node, for left-first ties
  };
  std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> heap;
  auto push_pair = [&](std::size_t l) {
    const std::size_t r = nodes[l].next;
    if (r == kNone) return;
    const double t = (nodes[l].c - nodes[r].c) / (nodes[r].a - nodes[l].a);
    heap.push(Candidate{t, l, nodes[l].version, nodes[r].version, r, nodes[l].a});
  };
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) push_pair(k);

  TiltShiftRun run;
  double t = 0.0;
  double phi = 0.0;
  double integral = 0.0;  // int_0^t Phi

  auto level_at = [&](const Node& nd, double time, double integ) { return nd.c + (nd.a + lambda) * time - integ; };
  auto snapshot = [&]() {
    TiltShiftState st;
    st.time = t;
    st.phi = phi;
    for (std::size_t k = head; k != kNone; k = nodes[k].next) {
      // Round the shifted coordinate up if needed so that left + phi lands back on a.
      double left = nodes[k].a - phi;
      if (left + phi < nodes[k].a) left = std::nextafter(left, kInf);
      st.excursions.push_back(Excursion{std::max(0.0, left), nodes[k].length, level_at(nodes[k], t, integral)});
    }
    return st;
  };
  auto index_of = [&](std::size_t node) {
    std::size_t idx = 0;
    for (std::size_t k = head; k != node; k = nodes[k].next) ++idx;
    return idx;
  };
  if (record_states) run.states.push_back(snapshot());

  while (head != kNone) {
    while (!heap.empty()) {
      const Candidate& c = heap.top();
      if (nodes[c.left].alive && nodes[c.right].alive && nodes[c.left].version == c.left_version &&
          nodes[c.right].version == c.right_version && nodes[c.left].next == c.right) {
        break;
      }
      heap.pop();
    }
    double death = kInf;
    if (lambda > 0.0) death = t + std::max(0.0, -level_at(nodes[head], t, integral) / lambda);
    const double merge = heap.empty() ? kInf : std::max(t, heap.top().time);
    const double next = std::min(death, merge);
    if (!(next <= horizon) || !std::isfinite(next)) break;

    integral += phi * (next - t);
    t = next;
    if (death <= merge) {
      Node& top = nodes[head];
      top.alive = false;
      run.control.push(t, top.length);
      run.events.push_back(TiltShiftEvent{t, TiltShiftEventKind::Shift, 0, top.length});
      phi += top.length;
      head = top.next;
      if (head != kNone) nodes[head].prev = kNone;
    } else {
      const Candidate c = heap.top();
      heap.pop();
      Node& l = nodes[c.left];
      Node& r = nodes[c.right];
      const std::size_t k = index_of(c.left);
      l.length += r.length;
      l.next = r.next;
      if (r.next != kNone) nodes[r.next].prev = c.left;
      r.alive = false;
      ++l.version;
      run.events.push_back(TiltShiftEvent{t, TiltShiftEventKind::Merge, k, l.length});
      push_pair(c.left);
      if (l.prev != kNone) push_pair(l.prev);
    }
    if (record_states) run.states.push_back(snapshot());
  }
  if (std::isfinite(horizon) && horizon > t) {
    integral += phi * (horizon - t);
    t = horizon;
  }
  run.final_state = snapshot();
  return run;
}

/// g_t(x) = f0(x + Phi(t)) + (x + Phi(t) + lambda) t - int_0^t Phi(s) ds.
inline double g_t_reconstruct(const StepFunction& f0, const ControlMeasure& control, double lambda, double t,
                              double x) {
  const double phi = control.phi(t);
  return f0(x + phi) + (x + phi + lambda) * t - control.phi_integral(t);
}

struct TruncationRow {
  std::size_t n;
  double phi;
};

/// Phi^{(n)}(t) for the truncations m^{(n)} of m_i = i^{-alpha}, all sharing the same E_i.
/// Death times come from the closed-form recursion, so each row is exact.
inline std::vector<TruncationRow> truncation_convergence(double alpha, double lambda, double t,
                                                         const std::vector<std::size_t>& n_grid, RngStream& rng) {
  if (!(lambda > 0.0)) throw LambdaZero();
  if (n_grid.empty()) return {};
  const std::size_t nmax = *std::max_element(n_grid.begin(), n_grid.end());
  std::vector<double> m(nmax);
  std::vector<double> e(nmax);
  for (std::size_t i = 0; i < nmax; ++i) {
    m[i] = std::pow(static_cast<double>(i + 1), -alpha);
    e[i] = rng.exponential(m[i]);
  }
  std::vector<TruncationRow> out;
  for (std::size_t n : n_grid) {
    std::vector<double> heights(n);
    for (std::size_t i = 0; i < n; ++i) heights[i] = -e[i];
    const std::vector<double> td =
        death_times_recursive(std::span<const double>(m.data(), n), std::span<const double>(heights), lambda);
    double phi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (td[i] <= t) phi += m[i];
    }
    out.push_back(TruncationRow{n, phi});
  }
  return out;
}

}  // namespace mcld
