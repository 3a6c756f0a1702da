#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace eqec {

// Worker count: ENSEMBLE_QEC_THREADS caps it when set, hardware concurrency
// otherwise.
inline unsigned worker_count() {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("ENSEMBLE_QEC_THREADS")) {
    long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && cap < static_cast<long>(n)) n = static_cast<unsigned>(cap);
  }
  return n;
}

// Runs fn(i) for i in [0, n) on a bounded pool. Callers store results by
// index, so aggregation order (and therefore output) is independent of the
// thread count.
inline void parallel_for_indexed(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace eqec
