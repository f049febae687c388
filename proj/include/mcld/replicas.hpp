#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "mcld/rng.hpp"

namespace mcld {

/// Worker count used when the caller passes 0.
inline unsigned default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Run `fn(rng, k)` for k = 0..count-1, replica k on RngStream(seed, k).
/// Results come back in replica order whatever the scheduling.
template <class Fn>
auto run_replicas(std::size_t count, std::uint64_t seed, Fn&& fn, unsigned threads = 0) {
  using T = decltype(fn(std::declval<RngStream&>(), std::size_t{0}));
  std::vector<T> out(count);
  if (threads == 0) threads = default_threads();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t k = 0; k < count; ++k) {
      RngStream rng(seed, k);
      out[k] = fn(rng, k);
    }
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          RngStream rng(seed, k);
          out[k] = fn(rng, k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace mcld
