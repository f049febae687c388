#pragma once

// Goodness-of-fit utilities: KS one- and two-sample, chi-square.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "mcld/error.hpp"

namespace mcld {

struct StatReport {
  std::string name;
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  /// Human-readable threshold, e.g. "p > 0.01" or "D < 0.05".
  std::string threshold;
  bool passed = true;
};

inline constexpr std::size_t kMinSamples = 20;

/// Asymptotic Kolmogorov survival function Q(x) = 2 sum (-1)^{k-1} exp(-2 k^2 x^2).
inline double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// p-value for a KS statistic `d` with effective sample size `ne` (Stephens' correction).
inline double ks_p_value(double d, double ne) {
  const double s = std::sqrt(ne);
  return kolmogorov_survival((s + 0.12 + 0.11 / s) * d);
}

inline StatReport ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf,
                                std::string name = "ks_one_sample") {
  if (sample.size() < kMinSamples) throw TooFewSamples(sample.size());
  std::vector<double> a(sample.begin(), sample.end());
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  StatReport r;
  r.name = std::move(name);
  r.statistic = d;
  r.p_value = ks_p_value(d, n);
  r.n1 = a.size();
  return r;
}

/// Two-sample KS statistic; ties are stepped jointly, so identical samples give 0.
inline StatReport ks_two_sample(std::span<const double> sa, std::span<const double> sb,
                                std::string name = "ks_two_sample") {
  if (sa.size() < kMinSamples) throw TooFewSamples(sa.size());
  if (sb.size() < kMinSamples) throw TooFewSamples(sb.size());
  std::vector<double> a(sa.begin(), sa.end());
  std::vector<double> b(sb.begin(), sb.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  StatReport r;
  r.name = std::move(name);
  r.statistic = d;
  r.p_value = ks_p_value(d, na * nb / (na + nb));
  r.n1 = a.size();
  r.n2 = b.size();
  return r;
}

/// Pearson chi-square against expected counts (same total as observed).
inline StatReport chi_square(std::span<const double> observed, std::span<const double> expected,
                             std::string name = "chi_square") {
  if (observed.size() != expected.size() || observed.size() < 2) {
    throw std::invalid_argument("chi_square: need matching observed/expected with >= 2 cells");
  }
  double total = 0.0;
  for (double o : observed) total += o;
  if (total < static_cast<double>(kMinSamples)) throw TooFewSamples(static_cast<std::size_t>(total));
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!(expected[i] > 0.0)) throw std::invalid_argument("chi_square: expected counts must be > 0");
    const double diff = observed[i] - expected[i];
    stat += diff * diff / expected[i];
  }
  const double dof = static_cast<double>(observed.size() - 1);
  StatReport r;
  r.name = std::move(name);
  r.statistic = stat;
  r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(dof), stat));
  r.n1 = static_cast<std::size_t>(total);
  return r;
}

namespace detail {

inline std::string short_number(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace detail

/// Verdict helpers. They fill `threshold` and `passed`.
inline StatReport& require_p_above(StatReport& r, double alpha) {
  r.threshold = "p > " + detail::short_number(alpha);
  r.passed = r.p_value > alpha;
  return r;
}

inline StatReport& require_statistic_below(StatReport& r, double cap) {
  r.threshold = "statistic < " + detail::short_number(cap);
  r.passed = r.statistic < cap;
  return r;
}

inline double mean(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

inline double variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

}  // namespace mcld
