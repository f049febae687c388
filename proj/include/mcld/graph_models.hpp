#pragma once

// Mean-field graph dynamics at the level of component sizes (frozen
// percolation and forest fire), critical Erdos-Renyi initial states, and the
// Smoluchowski / controlled Burgers layer.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mcld/core.hpp"
#include "mcld/error.hpp"
#include "mcld/rng.hpp"

namespace mcld {

enum class GraphMode { Frozen, Fire };

struct ComponentState {
  std::size_t n = 0;                 ///< number of vertices the model started with
  std::vector<std::size_t> sizes;    ///< alive component sizes, any order
  GraphMode mode = GraphMode::Frozen;
  std::size_t frozen = 0;            ///< vertices removed by frozen-percolation deletions
  double time = 0.0;

  std::size_t alive() const { return std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}); }

  MassVector components() const {
    std::vector<double> v(sizes.begin(), sizes.end());
    return sort_desc(std::move(v));
  }

  std::size_t largest() const { return sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end()); }

  static ComponentState singletons(std::size_t n, GraphMode mode) {
    return ComponentState{n, std::vector<std::size_t>(n, 1), mode, 0, 0.0};
  }
};

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

  std::vector<std::size_t> component_sizes() {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < parent_.size(); ++i) {
      if (find(i) == i) out.push_back(size_[i]);
    }
    return out;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

// Fenwick tree over integer weights with prefix-sum search.
class Fenwick {
 public:
  explicit Fenwick(std::size_t n = 0) : tree_(n + 1, 0) {}

  std::size_t capacity() const { return tree_.size() - 1; }

  void grow(std::size_t n) {
    if (n <= capacity()) return;
    std::vector<std::uint64_t> w(capacity());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = weight(i);
    std::size_t cap = std::max<std::size_t>(n, 2 * capacity());
    tree_.assign(cap + 1, 0);
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i]) add(i, static_cast<std::int64_t>(w[i]));
    }
  }

  void add(std::size_t i, std::int64_t delta) {
    for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) {
      tree_[k] = static_cast<std::uint64_t>(static_cast<std::int64_t>(tree_[k]) + delta);
    }
  }

  std::uint64_t prefix(std::size_t count) const {
    std::uint64_t s = 0;
    for (std::size_t k = count; k > 0; k -= k & (~k + 1)) s += tree_[k];
    return s;
  }

  std::uint64_t weight(std::size_t i) const { return prefix(i + 1) - prefix(i); }

  /// Smallest index i with prefix(i + 1) > target.
  std::size_t find(std::uint64_t target) const {
    std::size_t pos = 0;
    std::size_t step = 1;
    while (step * 2 < tree_.size()) step *= 2;
    for (; step > 0; step /= 2) {
      if (pos + step < tree_.size() && tree_[pos + step] <= target) {
        pos += step;
        target -= tree_[pos];
      }
    }
    return pos;
  }

 private:
  std::vector<std::uint64_t> tree_;
};

}  // namespace detail

/// Component sizes of G(n, p), edges drawn by geometric skipping over vertex pairs.
inline ComponentState sample_er(std::size_t n, double p, RngStream& rng, GraphMode mode = GraphMode::Frozen) {
  if (n < 1) throw std::invalid_argument("sample_er: n must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_er: p must lie in [0, 1]");
  ComponentState s;
  s.n = n;
  s.mode = mode;
  if (p == 0.0) {
    s.sizes.assign(n, 1);
    return s;
  }
  if (p == 1.0) {
    s.sizes.assign(1, n);
    return s;
  }
  detail::UnionFind uf(n);
  const double log_q = std::log1p(-p);
  // Pairs (v, w) with w < v, enumerated row by row.
  long long v = 1;
  long long w = -1;
  const auto nn = static_cast<long long>(n);
  while (v < nn) {
    const double skip = std::floor(std::log(rng.uniform()) / log_q);
    w += 1 + static_cast<long long>(std::min(skip, 9e18));
    while (w >= v && v < nn) {
      w -= v;
      ++v;
    }
    if (v < nn) uf.unite(static_cast<std::size_t>(v), static_cast<std::size_t>(w));
  }
  s.sizes = uf.component_sizes();
  return s;
}

/// Erdos-Renyi graph in the critical window, p = (1 + u n^{-1/3}) / n.
inline ComponentState sample_er_critical(std::size_t n, double u, RngStream& rng, GraphMode mode = GraphMode::Frozen) {
  if (n < 2) throw std::invalid_argument("sample_er_critical: n must be >= 2");
  const double nd = static_cast<double>(n);
  return sample_er(n, (1.0 + u * std::cbrt(1.0 / nd)) / nd, rng, mode);
}

enum class GraphEventKind { Merge, Delete, Burn };

struct GraphEvent {
  double time;
  GraphEventKind kind;
  std::size_t a;  ///< size of the (first) component involved
  std::size_t b;  ///< merge: size of the second component; otherwise 0
};

struct GraphRun {
  ComponentState final_state;
  std::vector<GraphEvent> events;        ///< filled when requested
  std::vector<ComponentState> samples;   ///< state at each requested sample time
};

/// Component-level jump process: components of sizes k, l merge at rate k l / n;
/// a component of size k is deleted (Frozen) or burns into k singletons (Fire)
/// at rate lambda_n k. `sample_times` must be increasing.
inline GraphRun evolve(const ComponentState& s0, double lambda_n, double horizon, RngStream& rng,
                       std::span<const double> sample_times = {}, bool record_events = false) {
  if (lambda_n < 0.0) throw std::invalid_argument("evolve: lambda_n must be >= 0");
  if (!(horizon >= 0.0)) throw std::invalid_argument("evolve: horizon must be >= 0");
  const double n = static_cast<double>(s0.n);
  if (!(n > 0.0)) throw std::invalid_argument("evolve: n must be >= 1");

  std::vector<std::size_t> slot_size;
  std::vector<std::size_t> free_slots;
  detail::Fenwick fw(std::max<std::size_t>(s0.sizes.size(), 16));
  double total = 0.0;    // S: alive vertices
  double squares = 0.0;  // sum of k^2
  auto insert = [&](std::size_t k) {
    std::size_t slot;
    if (!free_slots.empty()) {
      slot = free_slots.back();
      free_slots.pop_back();
      slot_size[slot] = k;
    } else {
      slot = slot_size.size();
      slot_size.push_back(k);
      fw.grow(slot + 1);
    }
    fw.add(slot, static_cast<std::int64_t>(k));
    total += static_cast<double>(k);
    squares += static_cast<double>(k) * static_cast<double>(k);
  };
  auto remove = [&](std::size_t slot) {
    const std::size_t k = slot_size[slot];
    fw.add(slot, -static_cast<std::int64_t>(k));
    slot_size[slot] = 0;
    free_slots.push_back(slot);
    total -= static_cast<double>(k);
    squares -= static_cast<double>(k) * static_cast<double>(k);
  };
  auto pick = [&]() {
    const auto s = static_cast<std::uint64_t>(total + 0.5);
    return fw.find(rng.below(s));
  };
  for (std::size_t k : s0.sizes) {
    if (k > 0) insert(k);
  }

  GraphRun run;
  ComponentState cur = s0;
  auto snapshot = [&](double t) {
    ComponentState st;
    st.n = s0.n;
    st.mode = s0.mode;
    st.frozen = cur.frozen;
    st.time = t;
    for (std::size_t k : slot_size) {
      if (k > 0) st.sizes.push_back(k);
    }
    return st;
  };

  double t = s0.time;
  std::size_t next_sample = 0;
  const double end = s0.time + horizon;
  while (true) {
    const double merge_rate = (total * total - squares) / (2.0 * n);
    const double delete_rate = lambda_n * total;
    const double rate = merge_rate + delete_rate;
    const double dt = rate > 0.0 ? rng.exponential(rate) : std::numeric_limits<double>::infinity();
    const double t_next = t + dt;
    while (next_sample < sample_times.size() && sample_times[next_sample] < std::min(t_next, end)) {
      run.samples.push_back(snapshot(sample_times[next_sample]));
      ++next_sample;
    }
    if (!(t_next <= end)) break;
    t = t_next;
    if (rng.uniform() * rate < merge_rate) {
      std::size_t i = 0;
      std::size_t j = 0;
      do {
        i = pick();
        j = pick();
      } while (i == j);
      const std::size_t a = slot_size[i];
      const std::size_t b = slot_size[j];
      remove(i);
      remove(j);
      insert(a + b);
      if (record_events) run.events.push_back(GraphEvent{t, GraphEventKind::Merge, a, b});
    } else {
      const std::size_t i = pick();
      const std::size_t k = slot_size[i];
      remove(i);
      if (s0.mode == GraphMode::Fire) {
        for (std::size_t r = 0; r < k; ++r) insert(1);
        if (record_events) run.events.push_back(GraphEvent{t, GraphEventKind::Burn, k, 0});
      } else {
        cur.frozen += k;
        if (record_events) run.events.push_back(GraphEvent{t, GraphEventKind::Delete, k, 0});
      }
    }
  }
  while (next_sample < sample_times.size() && sample_times[next_sample] <= end) {
    run.samples.push_back(snapshot(sample_times[next_sample]));
    ++next_sample;
  }
  run.final_state = snapshot(std::isfinite(end) ? end : t);
  return run;
}

struct DensityTable {
  double t = 0.0;
  std::vector<double> v;  ///< v[k-1] = v_k, k = 1..K

  double operator()(std::size_t k) const { return k >= 1 && k <= v.size() ? v[k - 1] : 0.0; }
};

/// v_k = k * (number of size-k components) / n.
inline DensityTable densities(const ComponentState& s, std::size_t K) {
  DensityTable d;
  d.t = s.time;
  d.v.assign(K, 0.0);
  const double n = static_cast<double>(s.n);
  for (std::size_t k : s.sizes) {
    if (k >= 1 && k <= K) d.v[k - 1] += static_cast<double>(k) / n;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Smoluchowski equations with burning:
//   dv_k/dt = (k/2) sum_{l<k} v_l v_{k-l} - k v_k        (k >= 2)
//   dv_1/dt = -v_1 + phi(t)
// The k >= 2 equations for k <= K are closed, so truncation only enters
// through phi.

enum class Closure {
  /// phi(t) is the mass flux out of sizes <= K, so sum_{k<=K} v_k stays 1.
  ReinjectFlux,
  /// phi(t) is supplied by the caller; mass leaving sizes <= K piles up in the tail.
  Prescribed,
};

struct SmoluchowskiOptions {
  std::size_t K = 200;
  double dt = 1e-3;
  Closure closure = Closure::ReinjectFlux;
  std::function<double(double)> phi;  ///< used with Closure::Prescribed
};

struct SmoluchowskiRun {
  std::vector<double> times;
  std::vector<std::vector<double>> v;  ///< v[i][k-1] at times[i]
  std::vector<double> phi;             ///< burn intensity at times[i]
  std::vector<double> tail;            ///< mass that has left sizes <= K by times[i]
  std::size_t K = 0;

  DensityTable at(std::size_t i) const { return DensityTable{times[i], v[i]}; }
};

namespace detail {

// Coagulation part for k = 1..K plus the outflux past K; writes dv (without phi).
inline double smol_coagulation(const std::vector<double>& v, std::vector<double>& dv) {
  const std::size_t K = v.size();
  double out = 0.0;
  for (std::size_t k = 1; k <= K; ++k) {
    double gain = 0.0;
    for (std::size_t l = 1; l < k; ++l) gain += v[l - 1] * v[k - l - 1];
    const double kd = static_cast<double>(k);
    dv[k - 1] = 0.5 * kd * gain - kd * v[k - 1];
    out -= dv[k - 1];
  }
  return out;  // = -(d/dt) sum_{k<=K} v_k without burning
}

}  // namespace detail

/// RK4 integration of the truncated system; samples at multiples of `sample_every` (in steps).
inline SmoluchowskiRun smoluchowski_solve(const DensityTable& v0, double horizon, const SmoluchowskiOptions& opt,
                                          std::size_t sample_every = 1) {
  const std::size_t K = opt.K;
  if (K < 2) throw std::invalid_argument("smoluchowski_solve: K must be >= 2");
  if (!(opt.dt > 0.0)) throw std::invalid_argument("smoluchowski_solve: dt must be > 0");
  if (opt.closure == Closure::Prescribed && !opt.phi) {
    throw std::invalid_argument("smoluchowski_solve: prescribed closure needs phi");
  }
  std::vector<double> v(K, 0.0);
  double mass0 = 0.0;
  for (std::size_t k = 0; k < std::min(K, v0.v.size()); ++k) {
    v[k] = v0.v[k];
    mass0 += v[k];
  }
  if (mass0 > 1.0 + 1e-12) throw std::invalid_argument("smoluchowski_solve: initial densities sum to more than 1");

  auto rhs = [&](double t, const std::vector<double>& x, std::vector<double>& dx) {
    const double out = detail::smol_coagulation(x, dx);
    const double phi = opt.closure == Closure::ReinjectFlux ? out : opt.phi(t);
    dx[0] += phi;
    return std::pair<double, double>{phi, out};
  };

  SmoluchowskiRun run;
  run.K = K;
  double tail = 1.0 - mass0;
  std::vector<double> k1(K), k2(K), k3(K), k4(K), tmp(K);
  auto record = [&](double t) {
    std::vector<double> d(K);
    const auto [phi, out] = rhs(t, v, d);
    (void)out;
    run.times.push_back(t);
    run.v.push_back(v);
    run.phi.push_back(phi);
    run.tail.push_back(tail);
  };
  const auto steps = static_cast<std::size_t>(std::llround(horizon / opt.dt));
  record(0.0);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) * opt.dt;
    const double h = opt.dt;
    const auto r1 = rhs(t, v, k1);
    for (std::size_t k = 0; k < K; ++k) tmp[k] = v[k] + 0.5 * h * k1[k];
    const auto r2 = rhs(t + 0.5 * h, tmp, k2);
    for (std::size_t k = 0; k < K; ++k) tmp[k] = v[k] + 0.5 * h * k2[k];
    const auto r3 = rhs(t + 0.5 * h, tmp, k3);
    for (std::size_t k = 0; k < K; ++k) tmp[k] = v[k] + h * k3[k];
    const auto r4 = rhs(t + h, tmp, k4);
    for (std::size_t k = 0; k < K; ++k) v[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    // Re-injecting closure: tail counts all mass that passed K. Prescribed: the
    // tail is a reservoir fed by the flux past K and drained by the burning.
    const double outflow = h / 6.0 * (r1.second + 2.0 * r2.second + 2.0 * r3.second + r4.second);
    const double burned = h / 6.0 * (r1.first + 2.0 * r2.first + 2.0 * r3.first + r4.first);
    tail += opt.closure == Closure::ReinjectFlux ? outflow : outflow - burned;
    for (std::size_t k = 0; k < K; ++k) {
      if (v[k] < -1e-9) throw NegativeDensity(static_cast<int>(k + 1), v[k]);
    }
    if ((s + 1) % sample_every == 0) record(static_cast<double>(s + 1) * opt.dt);
  }
  return run;
}

/// Exact pre-gelation solution from v_1(0) = 1: v_k(t) = (k t)^{k-1} e^{-k t} / k!.
inline double smoluchowski_monodisperse(std::size_t k, double t) {
  const double kd = static_cast<double>(k);
  if (t == 0.0) return k == 1 ? 1.0 : 0.0;
  return std::exp((kd - 1.0) * std::log(kd * t) - kd * t - std::lgamma(kd + 1.0));
}

struct BurgersReport {
  std::vector<double> x;                 ///< x grid
  std::vector<std::vector<double>> V;    ///< V[i][j] = V(times[i], x[j])
  double boundary_max = 0.0;             ///< max_t |V(t, 0)|
  double residual_max = 0.0;             ///< sup |V_t + V V_x - phi e^{-x}| over the box
  double box_t0 = 0.0, box_t1 = 0.0, box_x0 = 0.0, box_x1 = 0.0;
  /// Characteristics: start points, end points by the two routes, and their largest gap.
  std::vector<double> xi_start;
  std::vector<double> xi_from_field;     ///< d xi / ds = V(s, xi)
  std::vector<double> xi_from_forcing;   ///< xi'' = phi e^{-xi}, xi'(0) = V(0, xi(0))
  /// False when the curve dips below box_x0, where truncation at K breaks the PDE.
  std::vector<bool> xi_in_box;
  double characteristic_gap = 0.0;       ///< over curves that stay in the box
};

/// V(t, x) = sum_k v_k(t) e^{-k x} - 1 by Horner in q = e^{-x}.
inline double laplace_V(const std::vector<double>& v, double x) {
  const double q = std::exp(-x);
  double s = 0.0;
  for (std::size_t k = v.size(); k-- > 0;) s = (s + v[k]) * q;
  return s - 1.0;
}

struct BurgersOptions {
  double x_max = 3.0;
  double dx = 5e-3;
  /// Residual box as fractions of the time range and absolute x bounds.
  double box_t_lo = 0.25, box_t_hi = 0.75;
  double box_x_lo = 0.5, box_x_hi = 3.0;
  std::vector<double> characteristic_starts{0.5, 1.0, 2.0, 3.0};
};

/// V table, boundary value, finite-difference residual of V_t = -V V_x + phi e^{-x}
/// on a central box, and characteristics computed two ways. Expects a run with
/// uniformly spaced sample times.
inline BurgersReport burgers_diagnostics(const SmoluchowskiRun& run, const BurgersOptions& opt = {}) {
  BurgersReport rep;
  if (run.times.size() < 3) throw std::invalid_argument("burgers_diagnostics: need at least 3 sample times");
  const std::size_t nx = static_cast<std::size_t>(std::llround(opt.x_max / opt.dx)) + 1;
  for (std::size_t j = 0; j < nx; ++j) rep.x.push_back(static_cast<double>(j) * opt.dx);
  const double T = run.times.back();
  rep.box_t0 = opt.box_t_lo * T;
  rep.box_t1 = opt.box_t_hi * T;
  rep.box_x0 = opt.box_x_lo;
  rep.box_x1 = opt.box_x_hi;
  rep.V.resize(run.times.size());
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    rep.V[i].resize(nx);
    for (std::size_t j = 0; j < nx; ++j) rep.V[i][j] = laplace_V(run.v[i], rep.x[j]);
    rep.boundary_max = std::max(rep.boundary_max, std::abs(rep.V[i][0]));
  }
  const double dt = run.times[1] - run.times[0];
  for (std::size_t i = 1; i + 1 < run.times.size(); ++i) {
    if (run.times[i] < rep.box_t0 - 1e-12 || run.times[i] > rep.box_t1 + 1e-12) continue;
    for (std::size_t j = 1; j + 1 < nx; ++j) {
      if (rep.x[j] < rep.box_x0 - 1e-12 || rep.x[j] > rep.box_x1 + 1e-12) continue;
      const double Vt = (rep.V[i + 1][j] - rep.V[i - 1][j]) / (2.0 * dt);
      const double Vx = (rep.V[i][j + 1] - rep.V[i][j - 1]) / (2.0 * opt.dx);
      const double r = Vt + rep.V[i][j] * Vx - run.phi[i] * std::exp(-rep.x[j]);
      rep.residual_max = std::max(rep.residual_max, std::abs(r));
    }
  }

  // Field and forcing interpolated linearly between sample times.
  auto field = [&](double t, double x) {
    const double pos = std::clamp(t / dt, 0.0, static_cast<double>(run.times.size() - 1));
    const auto i = std::min(static_cast<std::size_t>(pos), run.times.size() - 2);
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * laplace_V(run.v[i], x) + w * laplace_V(run.v[i + 1], x);
  };
  auto forcing = [&](double t) {
    const double pos = std::clamp(t / dt, 0.0, static_cast<double>(run.times.size() - 1));
    const auto i = std::min(static_cast<std::size_t>(pos), run.times.size() - 2);
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * run.phi[i] + w * run.phi[i + 1];
  };
  const double h = dt;
  for (double x0 : opt.characteristic_starts) {
    double a = x0;
    double b = x0;
    double bv = field(0.0, x0);
    bool in_box = true;
    for (std::size_t i = 0; i + 1 < run.times.size(); ++i) {
      const double t = run.times[i];
      if (a <= 0.0 || b <= 0.0) break;
      // RK4 for xi' = V(t, xi).
      const double p1 = field(t, a);
      const double p2 = field(t + 0.5 * h, a + 0.5 * h * p1);
      const double p3 = field(t + 0.5 * h, a + 0.5 * h * p2);
      const double p4 = field(t + h, a + h * p3);
      a += h / 6.0 * (p1 + 2.0 * p2 + 2.0 * p3 + p4);
      // RK4 for (xi, xi') with xi'' = phi e^{-xi}.
      const double q1x = bv, q1v = forcing(t) * std::exp(-b);
      const double q2x = bv + 0.5 * h * q1v, q2v = forcing(t + 0.5 * h) * std::exp(-(b + 0.5 * h * q1x));
      const double q3x = bv + 0.5 * h * q2v, q3v = forcing(t + 0.5 * h) * std::exp(-(b + 0.5 * h * q2x));
      const double q4x = bv + h * q3v, q4v = forcing(t + h) * std::exp(-(b + h * q3x));
      b += h / 6.0 * (q1x + 2.0 * q2x + 2.0 * q3x + q4x);
      bv += h / 6.0 * (q1v + 2.0 * q2v + 2.0 * q3v + q4v);
      in_box = in_box && a >= rep.box_x0 && b >= rep.box_x0;
    }
    rep.xi_start.push_back(x0);
    rep.xi_from_field.push_back(a);
    rep.xi_from_forcing.push_back(b);
    rep.xi_in_box.push_back(in_box);
    if (in_box) rep.characteristic_gap = std::max(rep.characteristic_gap, std::abs(a - b));
  }
  return rep;
}

}  // namespace mcld
