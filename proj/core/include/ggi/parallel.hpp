#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace ggi {

/// Thread budget for per-panel parallel work; capped by GGI_THREADS.
inline int thread_budget() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("GGI_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1 && cap < n) n = cap;
  }
  return n;
}

/// Runs f(i) for i in [0, n). Work items must write to disjoint state;
/// output is then identical for any thread count.
template <class F>
void parallel_for(size_t n, F&& f) {
  const int threads = thread_budget();
  if (threads <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  const size_t workers = std::min<size_t>(threads, n);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (size_t i = w; i < n; i += workers) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace ggi
