#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace reflectlab {

/// Worker count used by the Monte Carlo drivers; 0 means hardware concurrency.
void set_worker_count(std::size_t n);
std::size_t worker_count();

/// Draw indices are processed in fixed chunks of this size. Chunk results
/// are merged in index order, so results do not depend on the worker count.
inline constexpr std::uint64_t kChunkSize = 512;

/// Runs body(acc, i) for i in [0, n) with one accumulator per chunk and folds
/// the chunk accumulators left to right with merge(into, from).
template <class Acc, class Body, class Merge>
Acc parallel_reduce(std::uint64_t n, const Acc& init, Body body, Merge merge) {
  const std::uint64_t chunks = (n + kChunkSize - 1) / kChunkSize;
  std::vector<Acc> partial(chunks, init);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        const std::uint64_t end = std::min(n, (c + 1) * kChunkSize);
        for (std::uint64_t i = c * kChunkSize; i < end; ++i) body(partial[c], i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(chunks);
      }
    }
  };
  const std::size_t workers =
      static_cast<std::size_t>(std::min<std::uint64_t>(worker_count(), std::max<std::uint64_t>(chunks, 1)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  Acc total = init;
  for (auto& p : partial) merge(total, p);
  return total;
}

}  // namespace reflectlab
