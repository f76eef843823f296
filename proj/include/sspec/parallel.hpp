#pragma once

// Index-parallel map with results stored by index, so any reduction the caller
// performs afterwards runs in a fixed order. SSPEC_THREADS caps the worker count.

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sspec {

inline int thread_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SSPEC_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n > 0 ? n : cap, cap);
  }
  return std::max(n, 1);
}

template <class Fn>
void parallel_for(int count, Fn&& fn) {
  const int workers = std::min(thread_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < count; i += workers) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

template <class T, class Fn>
std::vector<T> parallel_map(int count, Fn&& fn) {
  std::vector<T> out(count);
  parallel_for(count, [&](int i) { out[i] = fn(i); });
  return out;
}

}  // namespace sspec
