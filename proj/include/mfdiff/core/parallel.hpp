#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mfdiff {

// Worker-count policy: explicit value > MFDIFF_JOBS env > hardware concurrency.
inline int default_jobs() {
  if (const char* env = std::getenv("MFDIFF_JOBS")) {
    const int j = std::atoi(env);
    if (j >= 1) return j;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(begin, end) over [0, n) split into contiguous chunks, at most `jobs`
// threads. Chunk boundaries depend only on (n, jobs), so deterministic work
// can key its randomness off the global index.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  if (n == 0) return;
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (jobs == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> threads;
  std::exception_ptr first_error;
  std::mutex err_mutex;
  const std::size_t chunk = (n + static_cast<std::size_t>(jobs) - 1) / static_cast<std::size_t>(jobs);
  for (int w = 0; w < jobs; ++w) {
    const std::size_t lo = static_cast<std::size_t>(w) * chunk;
    if (lo >= n) break;
    const std::size_t hi = std::min(n, lo + chunk);
    threads.emplace_back([&, lo, hi] {
      try {
        fn(lo, hi);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace mfdiff
