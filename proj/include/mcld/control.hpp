#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace mcld {

/// One deletion: the time it happened and the mass removed.
struct ControlAtom {
  double time;
  double mass;

  friend bool operator==(const ControlAtom&, const ControlAtom&) = default;
};

/// Record of deletions nu = sum mass_i delta_{time_i}; Phi(t) = nu[0, t].
class ControlMeasure {
 public:
  ControlMeasure() = default;
  explicit ControlMeasure(std::vector<ControlAtom> atoms) : atoms_(std::move(atoms)) {
    for (const ControlAtom& a : atoms_) {
      if (!(a.time >= 0.0) || !(a.mass > 0.0)) {
        throw std::invalid_argument("ControlMeasure: need time >= 0 and mass > 0");
      }
    }
    std::stable_sort(atoms_.begin(), atoms_.end(),
                     [](const ControlAtom& a, const ControlAtom& b) { return a.time < b.time; });
  }

  /// Append a deletion; times must not go backwards.
  void push(double time, double mass) {
    if (!atoms_.empty() && time < atoms_.back().time) {
      throw std::invalid_argument("ControlMeasure::push: time went backwards");
    }
    if (!(mass > 0.0)) throw std::invalid_argument("ControlMeasure::push: mass must be > 0");
    atoms_.push_back(ControlAtom{time, mass});
  }

  std::size_t size() const noexcept { return atoms_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }
  const ControlAtom& operator[](std::size_t i) const { return atoms_[i]; }
  auto begin() const noexcept { return atoms_.begin(); }
  auto end() const noexcept { return atoms_.end(); }
  const std::vector<ControlAtom>& atoms() const noexcept { return atoms_; }

  /// Total deleted mass up to and including time t.
  double phi(double t) const noexcept {
    double s = 0.0;
    for (const ControlAtom& a : atoms_) {
      if (a.time > t) break;
      s += a.mass;
    }
    return s;
  }

  /// Integral of Phi over [0, t], exact for the step function.
  double phi_integral(double t) const noexcept {
    double s = 0.0;
    for (const ControlAtom& a : atoms_) {
      if (a.time >= t) break;
      s += a.mass * (t - a.time);
    }
    return s;
  }

  double total() const noexcept {
    double s = 0.0;
    for (const ControlAtom& a : atoms_) s += a.mass;
    return s;
  }

  friend bool operator==(const ControlMeasure&, const ControlMeasure&) = default;

 private:
  std::vector<ControlAtom> atoms_;
};

}  // namespace mcld
