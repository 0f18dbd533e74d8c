#pragma once

#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace holosweep {

inline unsigned default_worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs fn(i) for i in [0, count) across worker threads. Work items must be
/// independent; results written to per-index slots stay deterministic.
template <typename Fn>
void parallel_for(int count, Fn&& fn, unsigned threads = 0) {
  if (count <= 0) return;
  unsigned workers = threads == 0 ? default_worker_count() : threads;
  if (workers > static_cast<unsigned>(count)) workers = static_cast<unsigned>(count);

  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (int i = static_cast<int>(w); i < count; i += static_cast<int>(workers)) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace holosweep
