#pragma once

// Path-parallel execution with reproducible reductions: work is cut into
// fixed-size chunks of path indices independent of the thread count, each
// chunk yields its own accumulator, and results come back in chunk order.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "jumpsde/error.hpp"

namespace jumpsde {

/// Thread count from a request: 0 means JUMPSDE_THREADS or the hardware count.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("JUMPSDE_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(begin, end) on every chunk [begin, end) of [0, items) and returns the
/// per-chunk results in chunk order.
template <class Acc, class Fn>
std::vector<Acc> run_chunks(std::uint64_t items, int threads, std::uint64_t chunk, Fn&& fn) {
  require(chunk >= 1, "run_chunks: chunk size must be >= 1");
  const std::uint64_t chunks = (items + chunk - 1) / chunk;
  std::vector<Acc> results(chunks);
  if (chunks == 0) return results;
  const int workers = static_cast<int>(std::min<std::uint64_t>(resolve_threads(threads), chunks));
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        const std::uint64_t begin = c * chunk;
        results[c] = fn(begin, std::min(items, begin + chunk));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(chunks);
        return;
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace jumpsde
