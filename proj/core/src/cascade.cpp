#include "citeflow/cascade.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>

#include "citeflow/parallel.hpp"

namespace citeflow {

namespace {

// Reusable single-root BFS state. The epoch counter makes "visited" reset an
// O(1) bump instead of an O(n) fill, which is what keeps the all-roots sweep
// within budget.
struct CascadeWorkspace {
  std::vector<std::uint32_t> epoch_of;
  std::vector<NodeId> queue;
  std::uint32_t epoch = 0;

  explicit CascadeWorkspace(NodeId n) : epoch_of(n, 0), queue(n) {}

  CascadeStats run(const CitationGraph& g, NodeId root) {
    ++epoch;
    epoch_of[root] = epoch;
    queue[0] = root;
    std::size_t head = 0, tail = 1;
    std::size_t level_end = 1;
    std::uint32_t depth = 0;
    std::uint32_t leaves = 0;
    while (head < tail) {
      if (head == level_end) {
        ++depth;
        level_end = tail;
      }
      const NodeId v = queue[head++];
      const auto nbrs = g.citers(v);
      // The reachable set is forward-closed, so "no forward neighbor inside
      // the cascade" is the same as "no forward neighbor at all".
      if (nbrs.empty()) ++leaves;
      for (NodeId w : nbrs) {
        if (epoch_of[w] == epoch) continue;
        epoch_of[w] = epoch;
        queue[tail++] = w;
      }
    }
    return {root, static_cast<std::uint32_t>(tail), depth, leaves};
  }
};

}  // namespace

CascadeStats cascade_from(const CitationGraph& g, NodeId root) {
  if (root >= g.node_count()) {
    throw std::invalid_argument("cascade_from: unknown root " + std::to_string(root));
  }
  CascadeWorkspace ws(g.node_count());
  return ws.run(g, root);
}

std::vector<CascadeStats> all_cascades(const CitationGraph& g, unsigned threads) {
  const NodeId n = g.node_count();
  std::vector<CascadeStats> results(n);
  if (n == 0) return results;

  // Dynamic blocks: cascade sizes are wildly uneven, so static partitioning
  // would leave workers idle. Results land at results[root]; scheduling
  // cannot change them.
  const unsigned workers = std::min<std::uint64_t>(effective_threads(threads), n);
  std::atomic<std::uint64_t> next{0};
  constexpr std::uint64_t kBlock = 256;

  parallel_invoke(workers, [&](unsigned) {
    CascadeWorkspace ws(n);
    while (true) {
      const std::uint64_t begin = next.fetch_add(kBlock, std::memory_order_relaxed);
      if (begin >= n) break;
      const std::uint64_t end = std::min<std::uint64_t>(begin + kBlock, n);
      for (std::uint64_t root = begin; root < end; ++root) {
        results[root] = ws.run(g, static_cast<NodeId>(root));
      }
    }
  });
  return results;
}

CascadeCorrelations cascade_correlations(std::span<const CascadeStats> stats,
                                         std::span<const std::uint64_t> outdeg) {
  if (stats.size() < 3) {
    throw std::invalid_argument("cascade_correlations: need at least 3 records");
  }
  const std::size_t n = stats.size();
  std::vector<double> size(n), depth(n), leaves(n), deg(n);
  for (std::size_t i = 0; i < n; ++i) {
    size[i] = stats[i].size;
    depth[i] = stats[i].depth;
    leaves[i] = stats[i].leaves;
    deg[i] = static_cast<double>(outdeg[stats[i].root]);
  }
  CascadeCorrelations c;
  c.size_outdeg = spearman(size, deg);
  c.size_depth = spearman(size, depth);
  c.size_leaves = spearman(size, leaves);
  c.depth_leaves = spearman(depth, leaves);
  return c;
}

}  // namespace citeflow
