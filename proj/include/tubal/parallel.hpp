#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace tubal {

namespace detail {

inline std::atomic<int>& thread_count_slot() {
  static std::atomic<int> count{0};  // 0 = use hardware concurrency
  return count;
}

}  // namespace detail

// Caps the worker count used by slice-parallel loops.  n <= 0 restores the
// hardware default.  Results never depend on this setting: parallel loops
// only distribute whole per-slice operations, never split one reduction.
inline void set_num_threads(int n) { detail::thread_count_slot().store(n <= 0 ? 0 : n); }

inline int num_threads() {
  int n = detail::thread_count_slot().load();
  if (n > 0) return n;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace detail {

// Static striding: worker w handles items w, w + nw, w + 2*nw, ...  Each
// item must be independent of the others and must not throw.
template <typename Fn>
void parallel_for(std::ptrdiff_t count, Fn&& fn) {
  if (count <= 0) return;
  int workers = num_threads();
  if (workers > count) workers = static_cast<int>(count);
  if (workers <= 1) {
    for (std::ptrdiff_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&fn, count, w, workers] {
      for (std::ptrdiff_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail

}  // namespace tubal
