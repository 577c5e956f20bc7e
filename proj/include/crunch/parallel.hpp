#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace crunch {

// Process-wide cap on worker threads (CLI --threads). 0 means "machine".
unsigned thread_cap() noexcept;
void set_thread_cap(unsigned n) noexcept;

// Static block partition over [0, n). Each index is processed exactly once
// and must only write to its own output slot, so results are identical for
// every worker count.
template <class Fn>
void parallel_for(std::ptrdiff_t n, Fn&& fn) {
  if (n <= 0) return;
  unsigned cap = thread_cap();
  if (cap == 0) cap = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers =
      static_cast<unsigned>(std::min<std::ptrdiff_t>(n, cap));
  if (workers <= 1) {
    for (std::ptrdiff_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::ptrdiff_t block = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::ptrdiff_t lo = static_cast<std::ptrdiff_t>(w) * block;
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(lo + block, n);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::ptrdiff_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace crunch
