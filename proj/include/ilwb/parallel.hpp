#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ilwb {

// Worker-thread count honored by the library's parallel loops: the
// ILWB_THREADS environment variable when set (clamped to >= 1), hardware
// concurrency otherwise.
inline int workerThreads() {
  if (const char* env = std::getenv("ILWB_THREADS")) {
    int n = std::atoi(env);
    return n >= 1 ? n : 1;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Index-parallel loop over pure work.  Results must be written to
// caller-owned, index-addressed slots; the lowest-index exception is
// rethrown, so failures are deterministic.
template <typename F>
void parallelFor(size_t count, F&& fn) {
  size_t threads = static_cast<size_t>(workerThreads());
  if (threads > count) threads = count;
  if (threads <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::mutex errorLock;
  size_t errorIndex = count;
  std::exception_ptr error;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= count) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(errorLock);
          if (i < errorIndex) {
            errorIndex = i;
            error = std::current_exception();
          }
        }
      }
    });
  for (std::thread& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

} // namespace ilwb
