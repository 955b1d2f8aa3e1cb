#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace sing {

/// Default worker count: SING_JOBS env var if set, else hardware threads.
inline int default_jobs() {
  if (const char* env = std::getenv("SING_JOBS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(0..n_tasks-1) on up to `jobs` threads. Tasks must be independent;
/// the first exception is rethrown on the calling thread.
inline void parallel_for(int n_tasks, int jobs,
                         const std::function<void(int)>& fn) {
  if (n_tasks <= 0) return;
  jobs = std::max(1, std::min(jobs, n_tasks));
  if (jobs == 1) {
    for (int i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_tasks) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(jobs);
  for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace sing
