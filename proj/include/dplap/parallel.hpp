#pragma once

#include <cstddef>
#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace dplap {

/// Worker count for data-parallel sweeps, from DPLAP_THREADS (default 1).
inline unsigned thread_count() {
  static const unsigned n = [] {
    const char* env = std::getenv("DPLAP_THREADS");
    if (!env) return 1u;
    try {
      const int v = std::stoi(env);
      return v > 0 ? static_cast<unsigned>(v) : 1u;
    } catch (...) {
      return 1u;
    }
  }();
  return n;
}

/// Calls f(k) for k in [0, n), split into contiguous blocks across threads.
/// Each k must write only its own outputs.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  const unsigned workers = thread_count();
  if (workers <= 1 || n < 4096) {
    for (std::size_t k = 0; k < n; ++k) f(k);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t block = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = w * block;
    const std::size_t hi = std::min(n, lo + block);
    if (lo >= hi) break;
    pool.emplace_back([&f, lo, hi] {
      for (std::size_t k = lo; k < hi; ++k) f(k);
    });
  }
}

}  // namespace dplap
