#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

#include "wholder/seminorm.hpp"

namespace wholder::detail {

/// Runs fn(i) for i in [0, n) on up to thread_budget() threads. Jobs write to their own slots,
/// so callers that reduce the slots in index order get thread-independent results.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const unsigned threads = std::min<std::size_t>(std::max(1u, thread_budget()), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace wholder::detail
