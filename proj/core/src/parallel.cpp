#include "citeflow/parallel.hpp"

#include <algorithm>

namespace citeflow {

unsigned effective_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_blocks(std::uint64_t n, std::uint64_t block_size, unsigned threads,
                     const std::function<void(std::uint64_t, std::uint64_t)>& fn) {
  if (n == 0) return;
  if (block_size == 0) block_size = 1;
  threads = std::min<std::uint64_t>(effective_threads(threads), (n + block_size - 1) / block_size);

  if (threads <= 1) {
    for (std::uint64_t begin = 0; begin < n; begin += block_size) {
      fn(begin, std::min(begin + block_size, n));
    }
    return;
  }

  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::uint64_t begin = next.fetch_add(block_size, std::memory_order_relaxed);
      if (begin >= n) break;
      fn(begin, std::min(begin + block_size, n));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

void parallel_invoke(unsigned threads, const std::function<void(unsigned)>& fn) {
  threads = std::max(1u, threads);
  if (threads == 1) {
    fn(0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back([&, i] { fn(i); });
  fn(0);
  for (auto& t : pool) t.join();
}

}  // namespace citeflow
