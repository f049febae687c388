#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mcld {

/// SplitMix64 finalizer; used only to decorrelate (seed, stream) pairs.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seeded random stream. Replica k of an experiment uses stream-id k, so
/// results do not depend on scheduling.
///
/// Implementation constant: the engine is std::mt19937_64 seeded with
/// splitmix64(seed) ^ splitmix64(stream ^ 0x5851f42d4c957f2d). Uniforms take the
/// top 53 bits and are shifted by half an ulp so they lie in the open interval
/// (0, 1); exponentials are -log(u) / rate; normals use the Marsaglia polar
/// method with one cached spare. None of these go through the
/// implementation-defined std distributions, so draws are reproducible bit for
/// bit on any conforming standard library.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed),
        stream_(stream),
        engine_(splitmix64(seed) ^ splitmix64(stream ^ 0x5851f42d4c957f2dULL)) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// Derive an independent stream, e.g. for a sub-task of replica `stream()`.
  RngStream split(std::uint64_t child) const {
    return RngStream(splitmix64(seed_ ^ splitmix64(stream_)), child);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Exponential with the given rate (mean 1 / rate).
  double exponential(double rate) { return -std::log(uniform()) / rate; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mcld
