#pragma once

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace cpt {

// Runs f(i) for i in [0, n) on `jobs` workers.  Each index is an
// independent unit of work; callers store results keyed by index, so
// output is bit-identical for any jobs value.  The lowest-index
// exception is rethrown after all workers finish.
template <typename F>
void parallel_for(int n, int jobs, F&& f) {
  if (n <= 0) return;
  if (jobs < 1) jobs = 1;
  if (jobs == 1 || n == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  jobs = std::min(jobs, n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace cpt
