#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "citeflow/graph.hpp"
#include "citeflow/stats.hpp"

namespace citeflow {

// Reachable-set statistics for one root: every paper the root influenced
// directly or transitively (BFS along forward edges).
struct CascadeStats {
  NodeId root = kNoNode;
  std::uint32_t size = 0;    // nodes reachable from root, root included
  std::uint32_t depth = 0;   // max BFS level from root
  std::uint32_t leaves = 0;  // members with no forward neighbor inside the cascade

  bool operator==(const CascadeStats&) const = default;
};

// Single-root BFS. The reachable set is forward-closed, so a member is a leaf
// exactly when its out-degree in g is zero; size/depth/leaves are set-wise
// and independent of adjacency order. Throws std::invalid_argument on an
// unknown root.
CascadeStats cascade_from(const CitationGraph& g, NodeId root);

// One CascadeStats per node, indexed by root id. Roots are partitioned over
// workers dynamically; each worker reuses an epoch-stamped visited array so
// no per-root O(n) clearing happens. threads = 0 means all cores.
std::vector<CascadeStats> all_cascades(const CitationGraph& g, unsigned threads = 0);

struct CascadeCorrelations {
  std::optional<CorrelationResult> size_outdeg;
  std::optional<CorrelationResult> size_depth;
  std::optional<CorrelationResult> size_leaves;
  std::optional<CorrelationResult> depth_leaves;
};

// Tie-corrected Spearman over the per-root series; outdeg must be indexable
// by stats[i].root. Constant series yield absent entries. Throws
// std::invalid_argument on fewer than 3 records.
CascadeCorrelations cascade_correlations(std::span<const CascadeStats> stats,
                                         std::span<const std::uint64_t> outdeg);

}  // namespace citeflow
