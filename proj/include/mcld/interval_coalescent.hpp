#pragma once

// Interval coalescent with linear deletion: ordered blocks, only neighbours
// merge (block k with k+1 at rate b_k * (b_{k+1} + ... + b_n)) and only the
// leftmost block is deleted (rate lambda * total).

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mcld/core.hpp"
#include "mcld/error.hpp"
#include "mcld/mcld_markov.hpp"
#include "mcld/rng.hpp"

namespace mcld {

struct IcldTransition {
  OrderedBlocks target;
  double rate;
  EventKind kind;
  std::size_t k;  ///< merged pair is (k, k+1); 0 for the deletion
};

inline OrderedBlocks merge_neighbours(const OrderedBlocks& b, std::size_t k) {
  std::vector<double> v;
  v.reserve(b.size() - 1);
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i == k) {
      v.push_back(b[k] + b[k + 1]);
      ++i;
    } else {
      v.push_back(b[i]);
    }
  }
  return OrderedBlocks(std::move(v));
}

inline OrderedBlocks drop_first(const OrderedBlocks& b) {
  return OrderedBlocks(std::vector<double>(b.begin() + 1, b.end()));
}

/// Neighbour merges k = 0..n-2 in order, then the leftmost deletion (omitted when lambda = 0).
inline std::vector<IcldTransition> icld_rates(const OrderedBlocks& b, double lambda) {
  if (b.empty()) throw std::invalid_argument("icld_rates: empty block sequence");
  if (lambda < 0.0) throw std::invalid_argument("icld_rates: lambda must be >= 0");
  std::vector<IcldTransition> out;
  double right = b.total() - b[0];
  for (std::size_t k = 0; k + 1 < b.size(); ++k) {
    out.push_back({merge_neighbours(b, k), b[k] * right, EventKind::Merge, k});
    right -= b[k + 1];
  }
  if (lambda > 0.0) out.push_back({drop_first(b), lambda * b.total(), EventKind::Delete, 0});
  return out;
}

using IcldRateFn = std::function<std::vector<IcldTransition>(const OrderedBlocks&, double)>;

inline double icld_exit_rate(const OrderedBlocks& b, double lambda) {
  double s = 0.0;
  for (const IcldTransition& tr : icld_rates(b, lambda)) s += tr.rate;
  return s;
}

inline std::pair<double, OrderedBlocks> icld_step(const OrderedBlocks& b, double lambda, RngStream& rng,
                                                 IcldTransition* chosen = nullptr) {
  const std::vector<IcldTransition> rates = icld_rates(b, lambda);
  double total = 0.0;
  for (const IcldTransition& tr : rates) total += tr.rate;
  if (!(total > 0.0)) throw AbsorbedState();
  const double dt = rng.exponential(total);
  const double target = rng.uniform() * total;
  double acc = 0.0;
  std::size_t pick = rates.size() - 1;
  for (std::size_t r = 0; r < rates.size(); ++r) {
    acc += rates[r].rate;
    if (target < acc) {
      pick = r;
      break;
    }
  }
  if (chosen) *chosen = rates[pick];
  return {dt, rates[pick].target};
}

using IcldTrajectory = BasicTrajectory<OrderedBlocks>;

/// Starts from a size-biased reordering of m0. Each event's `state_after` holds
/// the sorted state; `states` holds the ordered blocks.
inline IcldTrajectory icld_simulate(const MassVector& m0, double lambda, double horizon, RngStream& rng) {
  if (!(horizon >= 0.0)) throw std::invalid_argument("icld_simulate: horizon must be >= 0");
  IcldTrajectory traj;
  traj.horizon = horizon;
  if (m0.empty()) return traj;
  traj.initial = size_biased_reorder(m0, rng);
  OrderedBlocks cur = traj.initial;
  double t = 0.0;
  while (!cur.empty() && (lambda > 0.0 || cur.size() > 1)) {
    IcldTransition tr;
    auto [dt, next] = icld_step(cur, lambda, rng, &tr);
    if (t + dt > horizon) break;
    t += dt;
    McldEvent ev;
    ev.time = t;
    ev.kind = tr.kind;
    ev.i = tr.k;
    ev.j = tr.kind == EventKind::Merge ? tr.k + 1 : 0;
    ev.state_after = sort_desc(next);
    traj.events.push_back(std::move(ev));
    traj.states.push_back(next);
    cur = std::move(next);
  }
  return traj;
}

struct KernelIdentityTerms {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual() const { return std::abs(lhs - rhs); }
};

/// Both sides of sum_b pi_m(b) R_IC(b, b2) = R_MC(m, sort(b2)) pi_{sort(b2)}(b2).
///
/// The left side enumerates every distinct ordering of m (at most 8 blocks).
/// Repeated masses are allowed because size_biased_prob counts multiplicities.
inline KernelIdentityTerms kernel_identity_terms(const MassVector& m, const OrderedBlocks& b2, double lambda,
                                                 const IcldRateFn& rates = icld_rates) {
  if (m.size() > 8) throw std::invalid_argument("kernel_identity: at most 8 blocks");
  KernelIdentityTerms out;
  if (m.empty()) return out;
  std::vector<double> perm(m.begin(), m.end());
  std::sort(perm.begin(), perm.end());
  do {
    const OrderedBlocks b(perm);
    double r_ic = 0.0;
    for (const IcldTransition& tr : rates(b, lambda)) {
      if (tr.target == b2) r_ic += tr.rate;
    }
    if (r_ic > 0.0) out.lhs += size_biased_prob(m, b) * r_ic;
  } while (std::next_permutation(perm.begin(), perm.end()));

  const MassVector m2 = sort_desc(b2);
  out.rhs = mc_rate(m, m2, lambda) * size_biased_prob(m2, b2);
  return out;
}

inline double kernel_identity_residual(const MassVector& m, const OrderedBlocks& b2, double lambda) {
  return kernel_identity_terms(m, b2, lambda).residual();
}

/// Every ordered state reachable from some ordering of m in one ICLD jump.
inline std::vector<OrderedBlocks> icld_one_step_targets(const MassVector& m, double lambda) {
  std::vector<OrderedBlocks> out;
  if (m.empty()) return out;
  std::vector<double> perm(m.begin(), m.end());
  std::sort(perm.begin(), perm.end());
  do {
    for (const IcldTransition& tr : icld_rates(OrderedBlocks(perm), lambda)) {
      if (std::find(out.begin(), out.end(), tr.target) == out.end()) out.push_back(tr.target);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace mcld
