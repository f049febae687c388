#pragma once

#include <stdexcept>
#include <string>

namespace mcld {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A jump process was asked to step from a state with zero total rate.
class AbsorbedState : public Error {
 public:
  AbsorbedState() : Error("absorbed state: total jump rate is zero") {}
};

class OutOfHorizon : public Error {
 public:
  explicit OutOfHorizon(double t)
      : Error("time " + std::to_string(t) + " lies outside the trajectory horizon") {}
};

/// The particle system has no scheduled event (no particles, or lambda = 0 with one block).
class NoFurtherEvent : public Error {
 public:
  NoFurtherEvent() : Error("particle system has no further event") {}
};

class LambdaZero : public Error {
 public:
  LambdaZero() : Error("operation requires a strictly positive deletion rate lambda") {}
};

class TooFewSamples : public Error {
 public:
  explicit TooFewSamples(std::size_t n)
      : Error("statistical test needs at least 20 samples, got " + std::to_string(n)) {}
};

class TooFewExcursions : public Error {
 public:
  explicit TooFewExcursions(std::size_t n)
      : Error("excursion-level test needs at least 30 completed excursions, got " +
              std::to_string(n)) {}
};

/// Raised by the truncated Smoluchowski solver when a density goes below -1e-9.
class NegativeDensity : public Error {
 public:
  NegativeDensity(int k, double value)
      : Error("density v_" + std::to_string(k) + " became negative (" + std::to_string(value) +
              "); increase the truncation K") {}
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mcld
