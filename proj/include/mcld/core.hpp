#pragma once

// State-space types and sampling primitives shared by every simulator.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <iostream>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mcld/rng.hpp"

namespace mcld {

namespace detail {

inline void check_positive(std::span<const double> xs, const char* what) {
  for (double x : xs) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw std::invalid_argument(std::string(what) + ": entries must be finite and positive");
    }
  }
}

/// Sink for rare numerical notices (e.g. ulp perturbation of a height tie).
inline std::function<void(const std::string&)>& notice_sink() {
  static std::function<void(const std::string&)> sink = [](const std::string& msg) {
    std::clog << "mcld: " << msg << '\n';
  };
  return sink;
}

inline void notice(const std::string& msg) {
  if (notice_sink()) notice_sink()(msg);
}

}  // namespace detail

/// Finite non-increasing list of positive block masses.
class MassVector {
 public:
  MassVector() = default;
  MassVector(std::initializer_list<double> xs) : MassVector(std::vector<double>(xs)) {}
  explicit MassVector(std::vector<double> masses) : masses_(std::move(masses)) {
    detail::check_positive(masses_, "MassVector");
    if (!std::is_sorted(masses_.begin(), masses_.end(), std::greater<>())) {
      throw std::invalid_argument("MassVector: masses must be non-increasing");
    }
  }

  /// `n` blocks of equal mass.
  static MassVector uniform(std::size_t n, double mass = 1.0) {
    return MassVector(std::vector<double>(n, mass));
  }

  std::size_t size() const noexcept { return masses_.size(); }
  bool empty() const noexcept { return masses_.empty(); }
  double operator[](std::size_t i) const { return masses_[i]; }
  auto begin() const noexcept { return masses_.begin(); }
  auto end() const noexcept { return masses_.end(); }
  const std::vector<double>& values() const noexcept { return masses_; }
  double total() const noexcept { return std::accumulate(masses_.begin(), masses_.end(), 0.0); }
  /// Largest block, or 0 for the empty state.
  double largest() const noexcept { return masses_.empty() ? 0.0 : masses_.front(); }

  friend bool operator==(const MassVector&, const MassVector&) = default;

 private:
  std::vector<double> masses_;
};

/// Finite sequence of positive blocks in a meaningful left-to-right order.
class OrderedBlocks {
 public:
  OrderedBlocks() = default;
  OrderedBlocks(std::initializer_list<double> xs) : OrderedBlocks(std::vector<double>(xs)) {}
  explicit OrderedBlocks(std::vector<double> blocks) : blocks_(std::move(blocks)) {
    detail::check_positive(blocks_, "OrderedBlocks");
  }

  std::size_t size() const noexcept { return blocks_.size(); }
  bool empty() const noexcept { return blocks_.empty(); }
  double operator[](std::size_t i) const { return blocks_[i]; }
  auto begin() const noexcept { return blocks_.begin(); }
  auto end() const noexcept { return blocks_.end(); }
  const std::vector<double>& values() const noexcept { return blocks_; }
  double total() const noexcept { return std::accumulate(blocks_.begin(), blocks_.end(), 0.0); }

  friend bool operator==(const OrderedBlocks&, const OrderedBlocks&) = default;

 private:
  std::vector<double> blocks_;
};

/// One atom of a point measure on (-inf, 0).
struct Atom {
  double height;
  double mass;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Finite atomic measure on (-inf, 0), atoms sorted by height, highest first.
class PointMeasure {
 public:
  PointMeasure() = default;
  explicit PointMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    for (const Atom& a : atoms_) {
      if (!(a.height < 0.0) || !(a.mass > 0.0)) {
        throw std::invalid_argument("PointMeasure: heights must be < 0 and masses > 0");
      }
    }
    std::stable_sort(atoms_.begin(), atoms_.end(),
                     [](const Atom& a, const Atom& b) { return a.height > b.height; });
  }

  std::size_t size() const noexcept { return atoms_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }
  const Atom& operator[](std::size_t i) const { return atoms_[i]; }
  auto begin() const noexcept { return atoms_.begin(); }
  auto end() const noexcept { return atoms_.end(); }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }

  double total_mass() const noexcept {
    double s = 0.0;
    for (const Atom& a : atoms_) s += a.mass;
    return s;
  }

  /// Mass of atoms with height in the open interval (y, 0).
  double mass_above(double y) const noexcept {
    double s = 0.0;
    for (const Atom& a : atoms_) {
      if (a.height > y) s += a.mass;
    }
    return s;
  }

  /// Mass of atoms with height in [lo, hi].
  double mass_in(double lo, double hi) const noexcept {
    double s = 0.0;
    for (const Atom& a : atoms_) {
      if (a.height >= lo && a.height <= hi) s += a.mass;
    }
    return s;
  }

  friend bool operator==(const PointMeasure&, const PointMeasure&) = default;

 private:
  std::vector<Atom> atoms_;
};

/// Reorder blocks into non-increasing order.
inline MassVector sort_desc(const OrderedBlocks& b) {
  std::vector<double> v = b.values();
  std::sort(v.begin(), v.end(), std::greater<>());
  return MassVector(std::move(v));
}

inline MassVector sort_desc(std::vector<double> v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  return MassVector(std::move(v));
}

/// Euclidean distance with the shorter vector zero-padded.
inline double l2_distance(const MassVector& a, const MassVector& b) {
  const std::size_t n = std::max(a.size(), b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = i < a.size() ? a[i] : 0.0;
    const double y = i < b.size() ? b[i] : 0.0;
    s += (x - y) * (x - y);
  }
  return std::sqrt(s);
}

/// First `n` entries of `m`.
inline MassVector truncate(const MassVector& m, std::size_t n) {
  const std::size_t k = std::min(n, m.size());
  return MassVector(std::vector<double>(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(k)));
}

/// Independent E_i ~ Exp(m_i) (rate m_i), one per block, in input order.
inline std::vector<double> sample_exponentials(const MassVector& m, RngStream& rng) {
  std::vector<double> e(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) e[i] = rng.exponential(m[i]);
  return e;
}

/// Build mu = sum_i m_i delta_{-E_i}. A floating-point height collision pushes
/// the later atom down by one ulp.
inline PointMeasure exp_measure_from(const MassVector& m, std::span<const double> exps) {
  std::vector<Atom> atoms(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) atoms[i] = Atom{-exps[i], m[i]};
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const Atom& a, const Atom& b) { return a.height > b.height; });
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    if (!(atoms[i].height < atoms[i - 1].height)) {
      const double old = atoms[i].height;
      atoms[i].height = std::nextafter(atoms[i - 1].height, -std::numeric_limits<double>::infinity());
      detail::notice("exponential height tie at " + std::to_string(old) + " perturbed by one ulp");
    }
  }
  return PointMeasure(std::move(atoms));
}

/// Sample mu ~ Exp(m): atom of mass m_i at height -E_i, E_i ~ Exp(m_i).
inline PointMeasure sample_exp_measure(const MassVector& m, RngStream& rng) {
  if (m.empty()) throw std::invalid_argument("sample_exp_measure: empty mass vector");
  const std::vector<double> e = sample_exponentials(m, rng);
  return exp_measure_from(m, e);
}

/// Size-biased reordering: blocks sorted by increasing independent Exp(m_i) clocks.
inline OrderedBlocks size_biased_reorder(const MassVector& m, RngStream& rng) {
  if (m.empty()) throw std::invalid_argument("size_biased_reorder: empty mass vector");
  const std::vector<double> e = sample_exponentials(m, rng);
  std::vector<std::size_t> idx(m.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return e[a] < e[b]; });
  std::vector<double> out(m.size());
  for (std::size_t k = 0; k < idx.size(); ++k) out[k] = m[idx[k]];
  return OrderedBlocks(std::move(out));
}

/// Probability that a size-biased reordering of `m` produces the sequence `b`.
///
/// With distinct masses this is prod_r b_r / (b_r + ... + b_n). With repeated
/// masses several index orders give the same sequence, so the product is
/// multiplied by prod_v (count of v)!; the values then sum to one over the
/// distinct sequences. Returns 0 when `b` is not a rearrangement of `m`.
inline double size_biased_prob(const MassVector& m, const OrderedBlocks& b) {
  if (b.size() != m.size()) return 0.0;
  std::vector<double> sorted = b.values();
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  if (sorted != m.values()) return 0.0;

  double suffix = 0.0;
  std::vector<double> tail(b.size() + 1, 0.0);
  for (std::size_t r = b.size(); r-- > 0;) {
    suffix += b[r];
    tail[r] = suffix;
  }
  double p = 1.0;
  for (std::size_t r = 0; r < b.size(); ++r) p *= b[r] / tail[r];

  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    for (std::size_t f = 2; f <= j - i; ++f) p *= static_cast<double>(f);
    i = j;
  }
  return p;
}

}  // namespace mcld
