#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "citeflow/graph.hpp"

namespace citeflow {

// Inter-community citation counts and their deviation z-scores. counts[i][j]
// tallies citations flowing from community i (cited) to community j (citing).
// weight(i,j) = (N_ij - E_ij) / sqrt(E_ij) with E_ij = N_i. * N_.j / N, the
// count expected if citations ignored community structure. Cells whose row or
// column sum is zero have no defined expectation and are reported absent.
struct CommunityMatrix {
  std::vector<std::string> labels;
  std::vector<std::uint64_t> counts;  // C*C row-major
  std::vector<std::uint64_t> row_sums;
  std::vector<std::uint64_t> col_sums;
  std::uint64_t total = 0;
  std::vector<double> weights;  // filled by community_weights; NaN where absent
  bool weights_filled = false;

  std::size_t size() const { return labels.size(); }
  std::uint64_t count(std::size_t i, std::size_t j) const { return counts[i * size() + j]; }
  double weight(std::size_t i, std::size_t j) const { return weights[i * size() + j]; }
  bool weight_defined(std::size_t i, std::size_t j) const {
    return row_sums[i] > 0 && col_sums[j] > 0;
  }
  double expected(std::size_t i, std::size_t j) const {
    return static_cast<double>(row_sums[i]) * static_cast<double>(col_sums[j]) /
           static_cast<double>(total);
  }
};

// Builds a matrix directly from a C*C count block (row-major); sums and total
// are derived. Throws std::invalid_argument on a size mismatch.
CommunityMatrix matrix_from_counts(std::vector<std::string> labels,
                                   std::vector<std::uint64_t> counts);

struct CountReport {
  std::uint64_t counted_edges = 0;
  std::uint64_t dropped_unlabeled = 0;  // edges with an unlabeled endpoint
};

// Tallies every edge whose endpoints are both labeled, using the graph's
// community indexing. Throws DataError when no edge qualifies.
CommunityMatrix count_matrix(const CitationGraph& g, CountReport* report = nullptr);

// Fills weights per the z-score formula. Throws std::invalid_argument when
// total is zero.
CommunityMatrix community_weights(CommunityMatrix m);

enum class WeightLookupStatus : std::uint8_t { Ok, UnlabeledEndpoint, AbsentCell };

// Weight of the (cited_community, citing_community) cell; indices < 0 mean
// unlabeled. Non-throwing form for bulk edge scans.
WeightLookupStatus try_edge_weight(const CommunityMatrix& m, std::int16_t cited_community,
                                   std::int16_t citing_community, double& out);

// Weight attached to a concrete edge of g. The matrix must have been computed
// from g (identical label list). Throws DataError on an unlabeled endpoint or
// absent cell.
double edge_weight_lookup(const CommunityMatrix& m, const CitationGraph& g, NodeId cited,
                          NodeId citing);

// CSV twin of the heatmap: label header row/column, weights at 6 decimals,
// NA for absent cells.
void write_weights_csv(const CommunityMatrix& m, const std::string& path);
void write_counts_csv(const CommunityMatrix& m, const std::string& path);

// SVG grid with a diverging shade scale centered at 0 and clamped at the
// largest |weight|; absent cells drawn neutral gray.
void export_heatmap(const CommunityMatrix& m, const std::string& path);

}  // namespace citeflow
