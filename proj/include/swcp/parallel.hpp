#ifndef SWCP_PARALLEL_HPP_
#define SWCP_PARALLEL_HPP_

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace swcp {

inline unsigned default_workers() {
  const auto hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Evaluates fn(i) for i in [0, n) on up to `workers` threads and returns the
/// results in index order. Each replicate must derive its randomness from i
/// alone, so the output does not depend on the worker count. The first
/// exception thrown by any replicate is rethrown.
template <class Fn>
auto parallel_replicates(std::uint64_t n, unsigned workers, Fn&& fn)
    -> std::vector<decltype(fn(std::uint64_t{}))> {
  using result_t = decltype(fn(std::uint64_t{}));
  std::vector<result_t> out(n);
  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(n, 1)));
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (!failed.load(std::memory_order_relaxed)) {
        const auto i = next.fetch_add(1);
        if (i >= n) return;
        try {
          out[i] = fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace swcp

#endif  // SWCP_PARALLEL_HPP_
