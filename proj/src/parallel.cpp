#include "reflectlab/parallel.hpp"

namespace reflectlab {

namespace {
std::atomic<std::size_t> g_workers{0};
}

void set_worker_count(std::size_t n) { g_workers.store(n); }

std::size_t worker_count() {
  const std::size_t n = g_workers.load();
  if (n != 0) return n;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace reflectlab
