#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "eccc/types.hpp"

namespace eccc {

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Work items must
/// write to disjoint slots; the first exception is rethrown.
inline void parallel_for(Index n, int workers, const std::function<void(Index)>& fn) {
  if (n <= 0) return;
  const int nw = std::min<int>(std::max(1, workers), static_cast<int>(n));
  if (nw == 1) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nw));
  for (int t = 0; t < nw; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const Index i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace eccc
