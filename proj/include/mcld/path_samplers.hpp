#pragma once

// Grid samplers for Brownian motion with parabolic drift and for Levy processes
// without replacement, plus their excursions above the running minimum.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mcld/control.hpp"
#include "mcld/core.hpp"
#include "mcld/error.hpp"
#include "mcld/excursion_calculus.hpp"
#include "mcld/rng.hpp"
#include "mcld/stats.hpp"

namespace mcld {

/// Values at 0, h, 2h, ..., X.
struct GridPath {
  double h = 0.0;
  double X = 0.0;
  std::vector<double> samples;

  double x(std::size_t i) const { return static_cast<double>(i) * h; }
};

/// sqrt(kappa) B(x) - kappa x^2 / 2 + sum_i (c_i 1[E_i <= x] - c_i^2 x) + tau x, with E_i ~ Exp(c_i).
struct LevyParams {
  double kappa = 1.0;
  double tau = 0.0;
  std::vector<double> c;

  void validate() const {
    if (kappa < 0.0) throw std::invalid_argument("LevyParams: kappa must be >= 0");
    if (kappa == 0.0 && c.empty()) throw std::invalid_argument("LevyParams: kappa = 0 needs jumps");
    detail::check_positive(c, "LevyParams::c");
    if (!std::is_sorted(c.begin(), c.end(), std::greater<>())) {
      throw std::invalid_argument("LevyParams: c must be non-increasing");
    }
  }
};

namespace detail {

inline std::size_t grid_points(double h, double X) {
  if (!(h > 0.0) || !(X > 0.0)) throw std::invalid_argument("grid path: need h > 0 and X > 0");
  return static_cast<std::size_t>(std::llround(X / h)) + 1;
}

}  // namespace detail

/// B(x) - x^2 / 2 + u x on the grid.
inline GridPath sample_bmpd(double u, double h, double X, RngStream& rng) {
  const std::size_t n = detail::grid_points(h, X);
  GridPath p{h, X, std::vector<double>(n)};
  const double sd = std::sqrt(h);
  double b = 0.0;
  p.samples[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    b += sd * rng.normal();
    const double x = p.x(i);
    p.samples[i] = b - 0.5 * x * x + u * x;
  }
  return p;
}

/// Jumps sit at the first grid point >= E_i.
inline GridPath sample_levy_wr(const LevyParams& prm, double h, double X, RngStream& rng) {
  prm.validate();
  const std::size_t n = detail::grid_points(h, X);
  GridPath p{h, X, std::vector<double>(n, 0.0)};
  std::vector<double> jump_at(n, 0.0);
  double compensator = 0.0;
  for (double ci : prm.c) {
    const double e = rng.exponential(ci);
    const double idx = std::ceil(e / h);
    if (idx < static_cast<double>(n)) jump_at[static_cast<std::size_t>(idx)] += ci;
    compensator += ci * ci;
  }
  const double sd = std::sqrt(prm.kappa * h);
  double b = 0.0;
  double jumps = jump_at[0];
  p.samples[0] = jumps;
  for (std::size_t i = 1; i < n; ++i) {
    if (prm.kappa > 0.0) b += sd * rng.normal();
    jumps += jump_at[i];
    const double x = p.x(i);
    p.samples[i] = b - 0.5 * prm.kappa * x * x + jumps - compensator * x + prm.tau * x;
  }
  return p;
}

struct GridExcursions {
  ExcursionList completed;
  /// The last excursion, which never drops below its level inside the window.
  Excursion incomplete{0.0, 0.0, 0.0};
  bool has_incomplete = false;
};

/// Left endpoints are the strict running-minimum records of the samples; each
/// excursion runs to the next record. Lengths are index differences times h.
inline GridExcursions grid_excursions(const GridPath& p) {
  GridExcursions out;
  if (p.samples.empty()) return out;
  std::size_t left = 0;
  double record = p.samples[0];
  for (std::size_t i = 1; i < p.samples.size(); ++i) {
    if (p.samples[i] < record) {
      out.completed.push_back(Excursion{p.x(left), static_cast<double>(i - left) * p.h, record});
      left = i;
      record = p.samples[i];
    }
  }
  out.incomplete = Excursion{p.x(left), static_cast<double>(p.samples.size() - 1 - left) * p.h, record};
  out.has_incomplete = true;
  return out;
}

/// Step function whose excursions are the completed grid excursions.
inline StepFunction to_step_function(const ExcursionList& ex) {
  std::vector<double> len;
  std::vector<double> val;
  for (const Excursion& e : ex) {
    len.push_back(e.length);
    val.push_back(e.level);
  }
  return StepFunction::from_segments(len, val);
}

/// Scores for the exponential-levels property from one path.
///
/// Given its length m, an excursion's level should be -E with E ~ Exp(m). A
/// finite window only shows excursions whose level lies above the path's final
/// minimum, so levels are kept only above -L, where L = min(level_floor,
/// |level of the final incomplete excursion|); below that cut-off every
/// excursion is complete. Under the property z = m |level| then has the
/// truncated law P(z <= s) = (1 - e^{-s}) / (1 - e^{-m L}), and the score
/// (1 - e^{-z}) / (1 - e^{-m L}) is uniform on (0, 1). As L grows this reduces
/// to testing m |level| against Exp(1).
inline std::vector<double> excursion_level_scores(const GridExcursions& g, double min_length, double level_floor) {
  double cut = level_floor;
  if (g.has_incomplete) cut = std::min(cut, -g.incomplete.level);
  std::vector<double> out;
  if (!(cut > 0.0)) return out;
  for (const Excursion& e : g.completed) {
    if (e.length < min_length * (1.0 - 1e-9)) continue;
    const double depth = -e.level;
    if (depth > cut) continue;
    const double z = e.length * std::max(0.0, depth);
    out.push_back(-std::expm1(-z) / -std::expm1(-e.length * cut));
  }
  return out;
}

/// Uncorrected products length * |level| of completed excursions above min_length.
inline std::vector<double> excursion_level_products(const GridExcursions& g, double min_length) {
  std::vector<double> out;
  for (const Excursion& e : g.completed) {
    if (e.length < min_length * (1.0 - 1e-9)) continue;
    out.push_back(e.length * std::abs(e.level));
  }
  return out;
}

inline constexpr std::size_t kMinExcursions = 30;

/// KS test of pooled window-corrected scores against Uniform(0, 1).
inline StatReport excursion_levels_test(std::span<const double> pooled_scores) {
  if (pooled_scores.size() < kMinExcursions) throw TooFewExcursions(pooled_scores.size());
  return ks_one_sample(pooled_scores, [](double s) { return std::clamp(s, 0.0, 1.0); }, "excursion_levels");
}

inline StatReport excursion_levels_test(const GridPath& p, double min_length, double level_floor) {
  return excursion_levels_test(excursion_level_scores(grid_excursions(p), min_length, level_floor));
}

struct BmpdTiltShift {
  double u = 0.0;
  double horizon = 0.0;
  ControlMeasure control;
  ExcursionList final_excursions;  ///< configuration at the horizon (after shifts)
  std::vector<double> times;
  std::vector<double> window;      ///< u + t - Phi(t) at each entry of `times`

  double phi() const { return control.phi(horizon); }
};

/// Tilt-and-shift of the completed excursions of a BMPD(u) grid path.
inline BmpdTiltShift bmpd_tilt_shift(double u, double lambda, double h, double X, double horizon, RngStream& rng,
                                     std::size_t time_points = 11) {
  if (!(lambda > 0.0)) throw LambdaZero();
  const GridPath p = sample_bmpd(u, h, X, rng);
  const GridExcursions g = grid_excursions(p);
  BmpdTiltShift out;
  out.u = u;
  out.horizon = horizon;
  if (g.completed.empty()) return out;
  const TiltShiftRun run = tilt_shift_run(to_step_function(g.completed), lambda, horizon);
  out.control = run.control;
  out.final_excursions = run.final_state.excursions;
  for (std::size_t k = 0; k < time_points; ++k) {
    const double t = time_points == 1 ? horizon : horizon * static_cast<double>(k) / static_cast<double>(time_points - 1);
    out.times.push_back(t);
    out.window.push_back(u + t - run.control.phi(t));
  }
  return out;
}

/// Largest excursion lengths, descending, padded with zeros to `count`.
inline std::vector<double> top_lengths(const ExcursionList& ex, std::size_t count) {
  std::vector<double> v;
  for (const Excursion& e : ex) v.push_back(e.length);
  std::sort(v.begin(), v.end(), std::greater<>());
  v.resize(count, 0.0);
  return v;
}

}  // namespace mcld
