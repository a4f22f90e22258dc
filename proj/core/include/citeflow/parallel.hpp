#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace citeflow {

// Resolves a requested thread count: 0 means hardware_concurrency (at least
// 1), anything else is taken as given.
unsigned effective_threads(unsigned requested);

// Runs fn(block_begin, block_end) over [0, n) in dynamically scheduled blocks.
// Blocks are claimed from a shared atomic counter so uneven per-item cost
// balances across workers. fn must be safe to call concurrently. With one
// effective thread everything runs on the calling thread.
void parallel_blocks(std::uint64_t n, std::uint64_t block_size, unsigned threads,
                     const std::function<void(std::uint64_t, std::uint64_t)>& fn);

// Runs fn(thread_index) on `threads` workers (thread 0 is the caller when
// threads == 1).
void parallel_invoke(unsigned threads, const std::function<void(unsigned)>& fn);

}  // namespace citeflow
