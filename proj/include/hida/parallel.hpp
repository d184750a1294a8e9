// Minimal fork-join helper. Each index writes only its own output slot, so
// results do not depend on scheduling.
#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace hida {

inline std::atomic<int>& thread_limit() {
  static std::atomic<int> n{1};
  return n;
}

inline void set_threads(int n) { thread_limit() = n < 1 ? 1 : n; }

inline void parallel_for(int count, const std::function<void(int)>& f) {
  int nt = std::min(thread_limit().load(), count);
  if (nt <= 1) {
    for (int i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::atomic<bool> failed{false};
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&] {
      for (;;) {
        int i = next++;
        if (i >= count || failed) return;
        try {
          f(i);
        } catch (...) {
          if (!failed.exchange(true)) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace hida
