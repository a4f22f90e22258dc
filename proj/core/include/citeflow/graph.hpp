#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "citeflow/corpus.hpp"
#include "citeflow/types.hpp"

namespace citeflow {

struct CitationEdge {
  NodeId cited = kNoNode;
  NodeId citing = kNoNode;
  std::int32_t time_span = 0;  // year(citing) - year(cited)

  bool operator==(const CitationEdge&) const = default;
};

namespace detail {
class GraphAssembler;
}

// Immutable directed citation graph. Edges run cited -> citing (the direction
// information flows), so the forward adjacency of a node lists its citers and
// out-degree counts citations received; the reverse adjacency lists the
// node's in-corpus reference list. Node ids are dense, assigned by sorting
// external ids, which makes builds deterministic for any input order.
class CitationGraph {
 public:
  CitationGraph() = default;

  NodeId node_count() const { return static_cast<NodeId>(years_.size()); }
  std::uint64_t edge_count() const { return fwd_targets_.size(); }

  std::string_view external_id(NodeId v) const { return external_ids_[v]; }
  std::int32_t year(NodeId v) const { return years_[v]; }
  DocKind kind(NodeId v) const { return kinds_[v]; }

  // Community as index into community_labels(); -1 when unlabeled.
  std::int16_t community_index(NodeId v) const {
    return community_.empty() ? std::int16_t{-1} : community_[v];
  }
  std::optional<std::string_view> community(NodeId v) const {
    const std::int16_t c = community_index(v);
    if (c < 0) return std::nullopt;
    return std::string_view(labels_[static_cast<std::size_t>(c)]);
  }
  std::span<const std::string> community_labels() const { return labels_; }

  // Papers citing v, sorted by node id.
  std::span<const NodeId> citers(NodeId v) const {
    return {fwd_targets_.data() + fwd_offsets_[v], fwd_targets_.data() + fwd_offsets_[v + 1]};
  }
  // Papers v cites (in-corpus references), sorted by node id.
  std::span<const NodeId> references(NodeId v) const {
    return {rev_targets_.data() + rev_offsets_[v], rev_targets_.data() + rev_offsets_[v + 1]};
  }
  // Time spans aligned with citers(v).
  std::span<const std::int32_t> citer_spans(NodeId v) const {
    return {fwd_spans_.data() + fwd_offsets_[v], fwd_spans_.data() + fwd_offsets_[v + 1]};
  }

  std::uint64_t out_degree(NodeId v) const { return fwd_offsets_[v + 1] - fwd_offsets_[v]; }
  std::uint64_t in_degree(NodeId v) const { return rev_offsets_[v + 1] - rev_offsets_[v]; }

  YearRange valid_years() const { return valid_years_; }

  // Calls f(CitationEdge) for every edge, ordered by (cited, citing).
  template <class F>
  void for_each_edge(F&& f) const {
    for (NodeId u = 0; u < node_count(); ++u) {
      const std::uint64_t begin = fwd_offsets_[u], end = fwd_offsets_[u + 1];
      for (std::uint64_t i = begin; i < end; ++i) {
        f(CitationEdge{u, fwd_targets_[i], fwd_spans_[i]});
      }
    }
  }

  // Dense id for an external id, or kNoNode.
  NodeId find(std::string_view external_id) const;

 private:
  friend class detail::GraphAssembler;

  std::vector<std::string> external_ids_;
  std::vector<std::int32_t> years_;
  std::vector<DocKind> kinds_;
  std::vector<std::int16_t> community_;  // empty when no labels anywhere
  std::vector<std::string> labels_;      // sorted distinct community labels
  std::vector<std::uint64_t> fwd_offsets_;
  std::vector<NodeId> fwd_targets_;
  std::vector<std::int32_t> fwd_spans_;
  std::vector<std::uint64_t> rev_offsets_;
  std::vector<NodeId> rev_targets_;
  YearRange valid_years_{1900, 2010};
};

struct GraphBuildOptions {
  YearRange valid_years{1900, 2010};
  bool strict = true;  // lenient drops offending records/edges with counts
};

struct GraphBuildReport {
  std::uint64_t duplicate_edges = 0;
  std::uint64_t self_loops = 0;
  std::uint64_t dangling_edges = 0;        // lenient only
  std::uint64_t dropped_noyear_nodes = 0;  // lenient only
  std::uint64_t dropped_range_nodes = 0;   // lenient only
};

// Builds the graph from records and (cited_id, citing_id) pairs. communities,
// when given, must be parallel to records (as from assign_communities). In
// strict mode a record without a year, a year outside options.valid_years, or
// an unresolvable edge endpoint raises DataError; lenient mode drops and
// counts. Duplicate edges collapse to one; self-citations are dropped.
CitationGraph build_graph(std::span<const RawRecord> records,
                          std::span<const std::pair<std::string, std::string>> edges,
                          const GraphBuildOptions& options = {},
                          std::span<const std::optional<std::string>> communities = {},
                          GraphBuildReport* report = nullptr);

// All edges with time_span < 0. Same-year citations (span 0) are legitimate.
std::vector<CitationEdge> time_violations(const CitationGraph& g);

// Copy of g without the negative-span edges; node set unchanged. Analyses
// that need a DAG run on this.
CitationGraph drop_time_violations(const CitationGraph& g);

struct SubgraphResult {
  CitationGraph graph;
  std::vector<NodeId> original_ids;  // original_ids[new_id] = id in the parent graph
};

// Subgraph induced by node_set (ids in g). Throws std::invalid_argument on an
// unknown id; duplicates in node_set are ignored.
SubgraphResult induced_subgraph(const CitationGraph& g, std::span<const NodeId> node_set);

struct SnapshotProvenance {
  std::vector<std::pair<std::string, std::string>> input_hashes;  // (name, hex fnv1a64)
  std::vector<std::pair<std::string, std::uint64_t>> drop_counts;
};

// Binary snapshot (magic CGRF1, little-endian) plus a JSON sidecar at
// <path>.json carrying the provenance. Loading revalidates structure and
// raises DataError on corruption.
void save_snapshot(const CitationGraph& g, const std::string& path,
                   const SnapshotProvenance& provenance = {});
CitationGraph load_snapshot(const std::string& path);

}  // namespace citeflow
