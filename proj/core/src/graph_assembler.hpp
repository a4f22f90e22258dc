#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "citeflow/graph.hpp"

namespace citeflow::detail {

// Shared CSR construction for build_graph, induced_subgraph,
// drop_time_violations and snapshot loading. Callers pass validated node
// columns and edge pairs; edges must be (cited, citing) with in-range ids,
// deduplicated, without self-loops. Spans and the reverse direction are
// derived here.
class GraphAssembler {
 public:
  static CitationGraph assemble(std::vector<std::string> external_ids,
                                std::vector<std::int32_t> years, std::vector<DocKind> kinds,
                                std::vector<std::int16_t> community,
                                std::vector<std::string> labels,
                                std::vector<std::pair<NodeId, NodeId>> edges,
                                YearRange valid_years);

  // Variant for snapshot loading: adjacency arrays already in CSR form.
  // Validates offsets/targets and recomputes spans from years.
  static CitationGraph from_csr(std::vector<std::string> external_ids,
                                std::vector<std::int32_t> years, std::vector<DocKind> kinds,
                                std::vector<std::int16_t> community,
                                std::vector<std::string> labels,
                                std::vector<std::uint64_t> fwd_offsets,
                                std::vector<NodeId> fwd_targets,
                                std::vector<std::uint64_t> rev_offsets,
                                std::vector<NodeId> rev_targets, YearRange valid_years);
};

}  // namespace citeflow::detail
