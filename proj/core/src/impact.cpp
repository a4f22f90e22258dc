#include "citeflow/impact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace citeflow {

bool ImpactResult::has(NodeId v) const { return !std::isnan(by_node[v]); }

namespace {

std::uint64_t cell_key(std::int16_t community, std::int32_t year) {
  return (static_cast<std::uint64_t>(static_cast<std::uint16_t>(community)) << 32) |
         static_cast<std::uint32_t>(year);
}

}  // namespace

ImpactResult normalized_impact(const CitationGraph& g) {
  ImpactResult result;
  result.by_node.assign(g.node_count(), std::numeric_limits<double>::quiet_NaN());

  struct Cell {
    std::uint64_t degree_sum = 0;
    std::uint64_t papers = 0;
  };
  std::unordered_map<std::uint64_t, Cell> cells;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const std::int16_t c = g.community_index(v);
    if (c < 0) {
      ++result.skipped_unlabeled;
      continue;
    }
    Cell& cell = cells[cell_key(c, g.year(v))];
    cell.degree_sum += g.out_degree(v);
    ++cell.papers;
  }

  result.records.reserve(g.node_count() - result.skipped_unlabeled);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const std::int16_t c = g.community_index(v);
    if (c < 0) continue;
    const Cell& cell = cells[cell_key(c, g.year(v))];
    if (cell.degree_sum == 0) {
      ++result.excluded_zero_mean;
      continue;
    }
    const double mean = static_cast<double>(cell.degree_sum) / static_cast<double>(cell.papers);
    ImpactRecord rec;
    rec.node = v;
    rec.raw_outdeg = g.out_degree(v);
    rec.community = c;
    rec.year = g.year(v);
    rec.normalized = static_cast<double>(rec.raw_outdeg) / mean;
    result.by_node[v] = rec.normalized;
    result.records.push_back(rec);
  }
  return result;
}

EdgeStudyTable edge_study(const CitationGraph& g, const CommunityMatrix& weights,
                          const ImpactResult& impacts, const StudyFilter& filter) {
  if (!weights.weights_filled) {
    throw std::invalid_argument("edge_study: community weights not filled");
  }
  const auto graph_labels = g.community_labels();
  if (weights.labels.size() != graph_labels.size() ||
      !std::equal(weights.labels.begin(), weights.labels.end(), graph_labels.begin())) {
    throw std::invalid_argument("edge_study: weight matrix labels do not match the graph");
  }
  if (impacts.by_node.size() != g.node_count()) {
    throw std::invalid_argument("edge_study: impact table does not match the graph");
  }

  EdgeStudyTable table;
  g.for_each_edge([&](const CitationEdge& e) {
    if (filter.exclude_kinds.contains(g.kind(e.citing))) {
      ++table.dropped_kind;
      return;
    }
    if (filter.max_refs && g.in_degree(e.citing) >= *filter.max_refs) {
      ++table.dropped_refs;
      return;
    }
    if (filter.max_year && g.year(e.citing) > *filter.max_year) {
      ++table.dropped_year;
      return;
    }
    double w = 0;
    switch (try_edge_weight(weights, g.community_index(e.cited), g.community_index(e.citing), w)) {
      case WeightLookupStatus::UnlabeledEndpoint:
        ++table.dropped_unlabeled;
        return;
      case WeightLookupStatus::AbsentCell:
        ++table.dropped_absent_cell;
        return;
      case WeightLookupStatus::Ok:
        break;
    }
    if (!impacts.has(e.citing)) {
      ++table.dropped_no_impact;
      return;
    }
    EdgeStudyRow row;
    row.cited = e.cited;
    row.citing = e.citing;
    row.c_weight = w;
    row.time_diff = e.time_span;
    row.citing_impact = impacts.by_node[e.citing];
    row.citing_year = g.year(e.citing);
    row.citing_community = g.community_index(e.citing);
    table.rows.push_back(row);
  });
  return table;
}

namespace {

// Correlations over any row subset; absent (not an error) below 3 rows or on
// constant columns.
template <class RowRange>
StudyCorrelations correlations_over(const RowRange& rows) {
  StudyCorrelations out;
  out.rows = rows.size();
  if (rows.size() < 3) return out;
  std::vector<double> time_diff, c_weight, impact;
  time_diff.reserve(rows.size());
  c_weight.reserve(rows.size());
  impact.reserve(rows.size());
  for (const EdgeStudyRow& r : rows) {
    time_diff.push_back(r.time_diff);
    c_weight.push_back(r.c_weight);
    impact.push_back(r.citing_impact);
  }
  out.time_diff = spearman(time_diff, impact);
  out.c_weight = spearman(c_weight, impact);
  return out;
}

}  // namespace

StudyCorrelations overall_correlations(const EdgeStudyTable& table) {
  if (table.rows.size() < 3) {
    throw std::invalid_argument("overall_correlations: need at least 3 rows");
  }
  return correlations_over(table.rows);
}

SplitCorrelations split_correlations(const EdgeStudyTable& table, double quantile) {
  if (!(quantile > 0.0 && quantile <= 1.0)) {
    throw std::invalid_argument("split_correlations: quantile must be in (0, 1]");
  }
  std::unordered_map<NodeId, double> paper_impact;
  for (const EdgeStudyRow& r : table.rows) paper_impact.emplace(r.citing, r.citing_impact);
  if (paper_impact.size() < 10) {
    throw std::invalid_argument("split_correlations: need at least 10 distinct citing papers");
  }

  std::vector<double> impacts;
  impacts.reserve(paper_impact.size());
  for (const auto& [node, impact] : paper_impact) impacts.push_back(impact);
  std::sort(impacts.begin(), impacts.end());
  // Nearest-rank quantile over distinct citing papers; papers tied with the
  // threshold value fall into the bottom group.
  const std::size_t n = impacts.size();
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(quantile * static_cast<double>(n) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, n);
  const double threshold = impacts[rank - 1];

  std::vector<EdgeStudyRow> bottom, top;
  for (const EdgeStudyRow& r : table.rows) {
    (r.citing_impact <= threshold ? bottom : top).push_back(r);
  }
  SplitCorrelations out;
  out.threshold = threshold;
  out.bottom = correlations_over(bottom);
  out.top = correlations_over(top);
  for (const auto& [node, impact] : paper_impact) {
    if (impact <= threshold) ++out.bottom_papers;
    else ++out.top_papers;
  }
  return out;
}

std::vector<CommunityCorrelation> by_community_correlations(const EdgeStudyTable& table) {
  std::map<std::int16_t, std::vector<EdgeStudyRow>> groups;
  for (const EdgeStudyRow& r : table.rows) groups[r.citing_community].push_back(r);
  std::vector<CommunityCorrelation> out;
  out.reserve(groups.size());
  for (const auto& [community, rows] : groups) {
    CommunityCorrelation cc;
    cc.community = community;
    cc.correlations = correlations_over(rows);
    out.push_back(std::move(cc));
  }
  return out;
}

std::vector<EraCorrelation> by_era_correlations(const EdgeStudyTable& table,
                                                std::span<const YearRange> eras) {
  std::vector<EraCorrelation> out;
  out.reserve(eras.size());
  for (const YearRange& era : eras) {
    EraCorrelation ec;
    ec.era = era;
    std::vector<double> weight, log_impact;
    for (const EdgeStudyRow& r : table.rows) {
      if (!era.contains(r.citing_year)) continue;
      if (r.citing_impact <= 0.0) {
        ++ec.zero_impact_excluded;
        continue;
      }
      weight.push_back(r.c_weight);
      log_impact.push_back(std::log(r.citing_impact));
    }
    ec.rows_used = weight.size();
    if (weight.size() >= 3) ec.pearson_log_impact = pearson(weight, log_impact);
    out.push_back(std::move(ec));
  }
  return out;
}

std::vector<YearRange> default_eras() {
  return {{1980, 1984}, {1985, 1989}, {1990, 1994}, {1995, 1999}};
}

BooksStudy books_study(const CitationGraph& g) {
  std::vector<double> book_span, book_deg, paper_span, paper_deg;
  g.for_each_edge([&](const CitationEdge& e) {
    const DocKind k = g.kind(e.citing);
    if (k == DocKind::Book || k == DocKind::BookChapter) {
      book_span.push_back(e.time_span);
      book_deg.push_back(static_cast<double>(g.out_degree(e.citing)));
    } else if (k == DocKind::Paper) {
      paper_span.push_back(e.time_span);
      paper_deg.push_back(static_cast<double>(g.out_degree(e.citing)));
    }
  });
  BooksStudy out;
  out.book_edges = book_span.size();
  out.paper_edges = paper_span.size();
  if (book_span.size() >= 3) out.books = spearman(book_span, book_deg);
  if (paper_span.size() >= 3) out.papers = spearman(paper_span, paper_deg);
  return out;
}

}  // namespace citeflow
