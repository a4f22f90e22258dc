#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "citeflow/community.hpp"
#include "citeflow/graph.hpp"
#include "citeflow/stats.hpp"
#include "citeflow/types.hpp"

namespace citeflow {

// Field- and age-adjusted impact: a paper's citation count divided by the
// mean citation count of its (community, year) cell.
struct ImpactRecord {
  NodeId node = kNoNode;
  std::uint64_t raw_outdeg = 0;
  std::int16_t community = -1;
  std::int32_t year = 0;
  double normalized = 0.0;
};

struct ImpactResult {
  std::vector<ImpactRecord> records;   // one per labeled node in a nonzero-mean cell
  std::vector<double> by_node;         // normalized impact indexed by node id; NaN = absent
  std::uint64_t excluded_zero_mean = 0;  // labeled nodes in all-zero cells
  std::uint64_t skipped_unlabeled = 0;

  bool has(NodeId v) const;
  double normalized_of(NodeId v) const { return by_node[v]; }
};

// Normalizes every labeled node's out-degree by its cell mean. Within each
// surviving cell the mean of normalized values is exactly 1.
ImpactResult normalized_impact(const CitationGraph& g);

// Edge-level study filters, applied to the citing paper.
struct StudyFilter {
  KindMask exclude_kinds = KindMask::of({DocKind::Book, DocKind::BookChapter});
  std::optional<std::uint64_t> max_refs = 40;  // exclude citing with in-degree >= max_refs
  std::optional<std::int32_t> max_year = 2000;  // exclude citing published after max_year

  static StudyFilter none() { return {KindMask::none(), std::nullopt, std::nullopt}; }
};

struct EdgeStudyRow {
  NodeId cited = kNoNode;
  NodeId citing = kNoNode;
  double c_weight = 0.0;
  double time_diff = 0.0;
  double citing_impact = 0.0;  // normalized
  std::int32_t citing_year = 0;
  std::int16_t citing_community = -1;
};

struct EdgeStudyTable {
  std::vector<EdgeStudyRow> rows;
  std::uint64_t dropped_kind = 0;
  std::uint64_t dropped_refs = 0;
  std::uint64_t dropped_year = 0;
  std::uint64_t dropped_unlabeled = 0;
  std::uint64_t dropped_absent_cell = 0;
  std::uint64_t dropped_no_impact = 0;

  std::uint64_t dropped_total() const {
    return dropped_kind + dropped_refs + dropped_year + dropped_unlabeled + dropped_absent_cell +
           dropped_no_impact;
  }
};

// One row per edge whose citing paper passes the filter and whose endpoints
// are labeled with a defined weight cell and a defined citing impact. Drop
// reasons are counted in filter order (kind, refs, year, labels, cell,
// impact); each edge lands in the first bucket it fails.
EdgeStudyTable edge_study(const CitationGraph& g, const CommunityMatrix& weights,
                          const ImpactResult& impacts, const StudyFilter& filter = {});

struct StudyCorrelations {
  std::optional<CorrelationResult> time_diff;  // Spearman(time_diff, citing_impact)
  std::optional<CorrelationResult> c_weight;   // Spearman(c_weight, citing_impact)
  std::uint64_t rows = 0;
};

// Overall correlations over the whole table. Throws std::invalid_argument on
// fewer than 3 rows.
StudyCorrelations overall_correlations(const EdgeStudyTable& table);

struct SplitCorrelations {
  StudyCorrelations bottom;
  StudyCorrelations top;
  double threshold = 0.0;  // impact at the nearest-rank quantile
  std::uint64_t bottom_papers = 0;
  std::uint64_t top_papers = 0;
};

// Partitions distinct citing papers at the nearest-rank quantile of their
// normalized impact (ties at the threshold go to the bottom group), then
// correlates each group's edges. Groups with fewer than 3 rows come back
// absent. Throws std::invalid_argument below 10 distinct citing papers.
SplitCorrelations split_correlations(const EdgeStudyTable& table, double quantile = 0.9);

struct CommunityCorrelation {
  std::int16_t community = -1;
  StudyCorrelations correlations;
};

// Rows grouped by the citing paper's community, ordered by community index.
std::vector<CommunityCorrelation> by_community_correlations(const EdgeStudyTable& table);

struct EraCorrelation {
  YearRange era;
  std::optional<CorrelationResult> pearson_log_impact;  // r of (c_weight, log impact), with CI
  std::uint64_t rows_used = 0;
  std::uint64_t zero_impact_excluded = 0;
};

// Per-era Pearson of community weight against log normalized impact, grouped
// by citing year. Zero-impact rows are excluded and counted.
std::vector<EraCorrelation> by_era_correlations(const EdgeStudyTable& table,
                                                std::span<const YearRange> eras);

std::vector<YearRange> default_eras();  // 1980-84, 85-89, 90-94, 95-99

struct BooksStudy {
  std::optional<CorrelationResult> books;   // Spearman(time_span, citing raw out-degree)
  std::optional<CorrelationResult> papers;  // same, citing kind Paper
  std::uint64_t book_edges = 0;
  std::uint64_t paper_edges = 0;
};

// Over edges whose citing node is a book or chapter (companion numbers for
// papers), correlates edge time span with the citing node's raw citation
// count. Sides with fewer than 3 edges come back absent.
BooksStudy books_study(const CitationGraph& g);

}  // namespace citeflow
