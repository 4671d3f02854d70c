#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace tunneltime {

/// Number of workers to use: `requested`, or the hardware concurrency when 0,
/// never more than `jobs` and never less than 1.
inline unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (jobs < n) n = static_cast<unsigned>(std::max<std::size_t>(1, jobs));
  return n;
}

/// Runs body(i) for i in [0, jobs) on a pool of threads. Each index is handled
/// exactly once; results written by index stay in order. The first exception
/// is rethrown after all workers have stopped.
inline void parallel_for(std::size_t jobs, unsigned workers, const std::function<void(std::size_t)>& body) {
  const unsigned n = worker_count(workers, jobs);
  if (n <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto run = [&] {
    for (std::size_t i = next++; i < jobs; i = next++) {
      if (failed) return;
      try {
        body(i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < n; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace tunneltime
