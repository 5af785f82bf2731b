// Deterministic work distribution.
//
// Work is split into fixed chunks whose boundaries do not depend on the
// worker count. Each chunk writes only to its own output slots, and any
// cross-chunk reduction runs sequentially in chunk order afterwards, so
// results are bitwise identical for any number of workers.

#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ersi {

template <class Fn>
void parallel_chunks(std::size_t n_chunks, int workers, Fn&& fn) {
  if (n_chunks == 0) return;
  if (workers < 1) workers = 1;
  const std::size_t n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(workers), n_chunks);

  if (n_threads <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) fn(c);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= n_chunks) return;
      try {
        fn(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline std::size_t chunk_count(std::size_t n_items, std::size_t chunk_size) {
  return (n_items + chunk_size - 1) / chunk_size;
}

}  // namespace ersi
