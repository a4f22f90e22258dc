#include <citeflow/impact.hpp>
#include <citeflow/synth.hpp>

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "common/fixtures.hpp"

using citeflow::build_graph;
using citeflow::by_community_correlations;
using citeflow::by_era_correlations;
using citeflow::community_weights;
using citeflow::count_matrix;
using citeflow::DocKind;
using citeflow::edge_study;
using citeflow::EdgeStudyRow;
using citeflow::EdgeStudyTable;
using citeflow::KindMask;
using citeflow::NodeId;
using citeflow::normalized_impact;
using citeflow::overall_correlations;
using citeflow::RawRecord;
using citeflow::split_correlations;
using citeflow::StudyFilter;
using citeflow::YearRange;

namespace {

struct CorpusBuilder {
  std::vector<RawRecord> records;
  std::vector<std::optional<std::string>> labels;
  std::vector<std::pair<std::string, std::string>> edges;

  void node(std::string id, int year, const char* community,
            DocKind kind = DocKind::Paper) {
    RawRecord r;
    r.external_id = std::move(id);
    r.year = year;
    r.kind = kind;
    if (community)
      labels.emplace_back(community);
    else
      labels.emplace_back();
    records.push_back(std::move(r));
  }

  void cite(std::string cited, std::string citing) {
    edges.emplace_back(std::move(cited), std::move(citing));
  }

  citeflow::CitationGraph build() const {
    citeflow::GraphBuildOptions options;
    options.valid_years = {1900, 2100};
    return build_graph(records, edges, options, labels);
  }
};

// Rows built directly, for the pure table-level analyses.
EdgeStudyRow row(double c_weight, double impact, int year = 1995,
                 std::int16_t community = 0) {
  EdgeStudyRow r;
  r.c_weight = c_weight;
  r.citing_impact = impact;
  r.citing_year = year;
  r.citing_community = community;
  r.time_diff = 1.0;
  return r;
}

}  // namespace

TEST_CASE("a cell with raw counts 0, 2, 4 normalizes to 0, 1, 2") {
  CorpusBuilder cb;
  // Three same-community papers from 1990: cited 0, 2 and 4 times.
  cb.node("x0", 1990, "A");
  cb.node("x2", 1990, "A");
  cb.node("x4", 1990, "A");
  for (int i = 0; i < 6; ++i) cb.node("c" + std::to_string(i), 1995, "A");
  cb.cite("x2", "c0");
  cb.cite("x2", "c1");
  for (int i = 0; i < 4; ++i) cb.cite("x4", "c" + std::to_string(i));
  const auto g = cb.build();

  const auto impacts = normalized_impact(g);
  CHECK(impacts.normalized_of(g.find("x0")) == doctest::Approx(0.0));
  CHECK(impacts.normalized_of(g.find("x2")) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(impacts.normalized_of(g.find("x4")) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("a paper alone in its cell has impact exactly 1") {
  CorpusBuilder cb;
  cb.node("solo", 1988, "A");
  cb.node("later1", 1995, "A");
  cb.node("later2", 1995, "A");
  cb.cite("solo", "later1");
  cb.cite("solo", "later2");
  cb.cite("later1", "later2");
  const auto g = cb.build();
  const auto impacts = normalized_impact(g);
  // solo is the only (A, 1988) paper; 2 citations / mean 2 = 1.
  CHECK(impacts.normalized_of(g.find("solo")) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("papers in never-cited cells are excluded, not divided by zero") {
  CorpusBuilder cb;
  cb.node("dead1", 1990, "A");
  cb.node("dead2", 1990, "A");
  cb.node("alive", 1991, "A");
  cb.node("citer", 1995, "A");
  cb.cite("alive", "citer");
  const auto g = cb.build();
  const auto impacts = normalized_impact(g);
  // dead1, dead2 and the never-cited citer all live in zero-mean cells.
  CHECK(impacts.excluded_zero_mean == 3);
  CHECK_FALSE(impacts.has(g.find("dead1")));
  CHECK_FALSE(impacts.has(g.find("dead2")));
  CHECK_FALSE(impacts.has(g.find("citer")));
  CHECK(impacts.has(g.find("alive")));
  // records hold only the survivors
  for (const auto& rec : impacts.records) CHECK(std::isfinite(rec.normalized));
}

TEST_CASE("unlabeled papers are skipped and counted") {
  CorpusBuilder cb;
  cb.node("lab", 1990, "A");
  cb.node("nolab", 1990, nullptr);
  cb.node("citer", 1995, "A");
  cb.cite("lab", "citer");
  cb.cite("nolab", "citer");
  const auto g = cb.build();
  const auto impacts = normalized_impact(g);
  CHECK(impacts.skipped_unlabeled == 1);
  CHECK_FALSE(impacts.has(g.find("nolab")));
}

TEST_CASE("every surviving cell has mean normalized impact exactly 1") {
  citeflow::GenConfig config;
  config.n_nodes = 4000;
  config.n_communities = 6;
  config.seed = 11;
  const auto corpus = citeflow::generate(config);
  std::vector<std::optional<std::string>> labels;
  for (const auto& r : corpus.records) labels.emplace_back(r.venue);
  citeflow::GraphBuildOptions options;
  options.valid_years = config.years;
  const auto g = build_graph(corpus.records, corpus.edges, options, labels);

  const auto impacts = normalized_impact(g);
  std::map<std::pair<std::int16_t, std::int32_t>, std::pair<double, std::uint64_t>>
      cells;
  for (const auto& rec : impacts.records) {
    auto& [sum, count] = cells[{rec.community, rec.year}];
    sum += rec.normalized;
    ++count;
  }
  REQUIRE_FALSE(cells.empty());
  for (const auto& [key, cell] : cells) {
    const auto& [sum, count] = cell;
    CHECK(std::fabs(sum / static_cast<double>(count) - 1.0) < 1e-9);
  }
}

TEST_CASE("the study filter excludes book citers, heavy citers, late citers") {
  CorpusBuilder cb;
  cb.node("old", 1980, "A");
  cb.node("old2", 1980, "A");
  cb.node("bookciter", 1990, "A", DocKind::Book);
  cb.node("paperciter", 1990, "A");
  cb.node("lateciter", 2005, "A");
  // meta must cite paperciter or the (A, 1990) cell mean is zero and the
  // paperciter rows would fall out for a different reason.
  cb.node("meta", 2000, "A");
  cb.cite("old", "bookciter");
  cb.cite("old", "paperciter");
  cb.cite("old", "lateciter");
  cb.cite("old2", "paperciter");
  cb.cite("paperciter", "meta");
  const auto g = cb.build();
  const auto weights = community_weights(count_matrix(g));
  const auto impacts = normalized_impact(g);

  StudyFilter filter;  // books/chapters out, max_refs 40, max_year 2000
  const auto table = edge_study(g, weights, impacts, filter);
  CHECK(table.dropped_kind == 1);
  CHECK(table.dropped_year == 1);
  // Only the paperciter edges remain as rows.
  REQUIRE(table.rows.size() == 2);
  for (const auto& r : table.rows)
    CHECK(g.external_id(r.citing) == "paperciter");
}

TEST_CASE("a citing paper at the reference cap is excluded") {
  CorpusBuilder cb;
  cb.node("hungry", 1999, "A");
  cb.node("modest", 1999, "A");
  // late keeps the (A, 1999) cell mean above zero so hungry and modest have
  // defined impacts.
  cb.node("late", 2000, "A");
  for (int i = 0; i < 45; ++i) cb.node("src" + std::to_string(i), 1990, "A");
  for (int i = 0; i < 45; ++i) cb.cite("src" + std::to_string(i), "hungry");
  for (int i = 0; i < 3; ++i) cb.cite("src" + std::to_string(i), "modest");
  cb.cite("hungry", "late");
  cb.cite("modest", "late");
  const auto g = cb.build();
  const auto weights = community_weights(count_matrix(g));
  const auto impacts = normalized_impact(g);

  StudyFilter filter;
  filter.max_refs = 40;
  const auto table = edge_study(g, weights, impacts, filter);
  CHECK(table.dropped_refs == 45);
  for (const auto& r : table.rows)
    CHECK(g.external_id(r.citing) == "modest");

  // Tightening the cap below the modest citer's reference count empties the
  // table; loosening it re-admits the heavy citer. Row counts are monotone.
  StudyFilter tight;
  tight.max_refs = 3;
  StudyFilter loose;
  loose.max_refs = 100;
  const auto tight_rows = edge_study(g, weights, impacts, tight).rows.size();
  const auto default_rows = table.rows.size();
  const auto loose_rows = edge_study(g, weights, impacts, loose).rows.size();
  CHECK(tight_rows <= default_rows);
  CHECK(default_rows <= loose_rows);
  CHECK(loose_rows == 48);
}

TEST_CASE("study rows carry the community-flow weight of their edge") {
  // Diagonal-heavy two-community corpus: within-edges weigh +3/sqrt(5).
  CorpusBuilder cb;
  cb.node("hubA", 1990, "A");
  cb.node("hubB", 1990, "B");
  for (int i = 1; i <= 8; ++i) cb.node("a" + std::to_string(i), 1999, "A");
  for (int i = 1; i <= 8; ++i) cb.node("b" + std::to_string(i), 1999, "B");
  for (int i = 1; i <= 8; ++i) cb.cite("hubA", "a" + std::to_string(i));
  for (int i = 1; i <= 2; ++i) cb.cite("hubA", "b" + std::to_string(i));
  for (int i = 1; i <= 2; ++i) cb.cite("hubB", "a" + std::to_string(i));
  for (int i = 1; i <= 8; ++i) cb.cite("hubB", "b" + std::to_string(i));
  // Unlabeled late citers give the 1999 cells a nonzero mean so the study
  // keeps their rows, without touching the labeled count matrix.
  cb.node("metaA", 2005, nullptr);
  cb.node("metaB", 2005, nullptr);
  cb.cite("a1", "metaA");
  cb.cite("b1", "metaB");
  const auto g = cb.build();
  const auto weights = community_weights(count_matrix(g));
  const auto impacts = normalized_impact(g);
  const auto table = edge_study(g, weights, impacts, StudyFilter::none());

  const double expect = 3.0 / std::sqrt(5.0);
  std::size_t within = 0;
  std::size_t across = 0;
  for (const auto& r : table.rows) {
    const bool same = g.community(r.cited) == g.community(r.citing);
    if (same) {
      CHECK(r.c_weight == doctest::Approx(expect).epsilon(1e-12));
      ++within;
    } else {
      CHECK(r.c_weight == doctest::Approx(-expect).epsilon(1e-12));
      ++across;
    }
  }
  CHECK(within == 16);
  CHECK(across == 4);
}

TEST_CASE("perfectly co-monotone rows give overall rho of 1") {
  EdgeStudyTable table;
  for (int i = 0; i < 12; ++i) {
    auto r = row(0.1 * i, 0.5 + 0.2 * i);
    r.time_diff = 30.0 - i;  // co-monotone downward
    table.rows.push_back(r);
  }
  const auto overall = overall_correlations(table);
  REQUIRE(overall.c_weight.has_value());
  REQUIRE(overall.time_diff.has_value());
  CHECK(overall.c_weight->value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(overall.time_diff->value == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(overall.rows == 12);
}

TEST_CASE("constant impact leaves the overall correlations absent") {
  EdgeStudyTable table;
  for (int i = 0; i < 8; ++i) table.rows.push_back(row(0.1 * i, 1.0));
  const auto overall = overall_correlations(table);
  CHECK_FALSE(overall.c_weight.has_value());
  CHECK_FALSE(overall.time_diff.has_value());
}

TEST_CASE("uniform impacts put every citing paper in the bottom split") {
  EdgeStudyTable table;
  for (int i = 0; i < 12; ++i) {
    auto r = row(0.1 * i, 2.0);
    r.citing = static_cast<NodeId>(i);
    table.rows.push_back(r);
  }
  const auto split = split_correlations(table, 0.9);
  CHECK(split.bottom_papers == 12);
  CHECK(split.top_papers == 0);
  CHECK(split.threshold == doctest::Approx(2.0));
  CHECK_FALSE(split.top.c_weight.has_value());
  // Bottom inherits constant impact, so its correlations are absent too.
  CHECK_FALSE(split.bottom.c_weight.has_value());
}

TEST_CASE("with impacts 1..10 the 0.9 quantile isolates the top paper") {
  EdgeStudyTable table;
  for (int i = 1; i <= 10; ++i) {
    auto r = row(0.05 * i, static_cast<double>(i));
    r.citing = static_cast<NodeId>(i);
    // A couple of edges per citing paper so each group can correlate.
    table.rows.push_back(r);
    auto r2 = row(0.05 * i + 0.01, static_cast<double>(i));
    r2.citing = static_cast<NodeId>(i);
    table.rows.push_back(r2);
  }
  const auto split = split_correlations(table, 0.9);
  // Nearest-rank 0.9 of 10 distinct papers: the 9th impact, i.e. 9.
  CHECK(split.threshold == doctest::Approx(9.0));
  CHECK(split.bottom_papers == 9);  // ties at the threshold stay in the bottom
  CHECK(split.top_papers == 1);
  CHECK(split.bottom.rows == 18);
  CHECK(split.top.rows == 2);
}

TEST_CASE("bottom and top splits partition the study rows") {
  std::mt19937_64 rng(505);
  EdgeStudyTable table;
  for (int paper = 0; paper < 40; ++paper) {
    const double impact = std::pow(1.3, paper % 13) * 0.25;
    const int edges = 1 + static_cast<int>(rng() % 4);
    for (int e = 0; e < edges; ++e) {
      auto r = row(static_cast<double>(rng() % 100) / 50.0 - 1.0, impact);
      r.citing = static_cast<NodeId>(paper);
      table.rows.push_back(r);
    }
  }
  const auto split = split_correlations(table, 0.9);
  CHECK(split.bottom.rows + split.top.rows == table.rows.size());
  CHECK(split.bottom_papers + split.top_papers == 40);
  const auto overall = overall_correlations(table);
  CHECK(overall.rows == split.bottom.rows + split.top.rows);
}

TEST_CASE("the split needs at least ten distinct citing papers") {
  EdgeStudyTable table;
  for (int i = 0; i < 9; ++i) {
    auto r = row(0.1 * i, 1.0 + i);
    r.citing = static_cast<NodeId>(i);
    table.rows.push_back(r);
  }
  CHECK_THROWS_AS((void)split_correlations(table, 0.9), std::invalid_argument);
}

TEST_CASE("a single-community table reproduces the overall correlations") {
  EdgeStudyTable table;
  std::mt19937_64 rng(66);
  for (int i = 0; i < 25; ++i) {
    auto r = row(static_cast<double>(rng() % 1000) / 500.0 - 1.0,
                 0.1 + static_cast<double>(rng() % 100) / 25.0);
    r.time_diff = static_cast<double>(1 + rng() % 30);
    r.citing_community = 3;
    table.rows.push_back(r);
  }
  const auto groups = by_community_correlations(table);
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].community == 3);
  const auto overall = overall_correlations(table);
  REQUIRE(groups[0].correlations.c_weight.has_value());
  REQUIRE(overall.c_weight.has_value());
  CHECK(groups[0].correlations.c_weight->value ==
        doctest::Approx(overall.c_weight->value).epsilon(1e-15));
  CHECK(groups[0].correlations.rows == overall.rows);
}

TEST_CASE("a community with too few rows reports absent correlations") {
  EdgeStudyTable table;
  for (int i = 0; i < 6; ++i) table.rows.push_back(row(0.1 * i, 1.0 + i, 1995, 0));
  auto r1 = row(0.3, 2.0, 1995, 1);
  auto r2 = row(0.5, 3.0, 1995, 1);
  table.rows.push_back(r1);
  table.rows.push_back(r2);
  const auto groups = by_community_correlations(table);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].correlations.c_weight.has_value());
  CHECK_FALSE(groups[1].correlations.c_weight.has_value());
  CHECK(groups[1].correlations.rows == 2);
}

TEST_CASE("a perfectly log-linear era has pearson r of 1") {
  EdgeStudyTable table;
  for (int i = 0; i < 10; ++i)
    table.rows.push_back(row(0.1 * i, std::exp(0.3 * i), 1986 + i % 4));
  const std::vector<YearRange> eras{{1985, 1989}};
  const auto out = by_era_correlations(table, eras);
  REQUIRE(out.size() == 1);
  REQUIRE(out[0].pearson_log_impact.has_value());
  CHECK(out[0].pearson_log_impact->value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out[0].rows_used == 10);
  REQUIRE(out[0].pearson_log_impact->ci95.has_value());
}

TEST_CASE("an era with no rows comes back absent") {
  EdgeStudyTable table;
  for (int i = 0; i < 5; ++i)
    table.rows.push_back(row(0.1 * i, 1.0 + i, 1995));
  const std::vector<YearRange> eras{{1980, 1984}, {1995, 1999}};
  const auto out = by_era_correlations(table, eras);
  REQUIRE(out.size() == 2);
  CHECK_FALSE(out[0].pearson_log_impact.has_value());
  CHECK(out[0].rows_used == 0);
  CHECK(out[1].pearson_log_impact.has_value());
}

TEST_CASE("zero-impact rows are excluded from the log-scale era fit") {
  EdgeStudyTable table;
  for (int i = 0; i < 6; ++i)
    table.rows.push_back(row(0.1 * i, std::exp(0.2 * i), 1990));
  table.rows.push_back(row(0.9, 0.0, 1990));
  const std::vector<YearRange> eras{{1990, 1994}};
  const auto out = by_era_correlations(table, eras);
  REQUIRE(out.size() == 1);
  CHECK(out[0].zero_impact_excluded == 1);
  CHECK(out[0].rows_used == 6);
  REQUIRE(out[0].pearson_log_impact.has_value());
  CHECK(out[0].pearson_log_impact->value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a planted per-era strengthening effect shows monotone r") {
  // Hand-built table: later eras mix progressively less noise into the
  // c_weight -> log(impact) relation, so r must not decrease era over era.
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  EdgeStudyTable table;
  const int era_start[4] = {1980, 1985, 1990, 1995};
  const double mix[4] = {2.0, 1.2, 0.6, 0.1};  // noise amplitude per era
  for (int e = 0; e < 4; ++e) {
    for (int i = 0; i < 400; ++i) {
      const double w = noise(rng);
      const double log_imp = w + mix[e] * noise(rng);
      table.rows.push_back(
          row(w, std::exp(log_imp), era_start[e] + i % 5));
    }
  }
  const auto out = by_era_correlations(table, citeflow::default_eras());
  REQUIRE(out.size() == 4);
  double prev = -2.0;
  for (const auto& era : out) {
    REQUIRE(era.pearson_log_impact.has_value());
    CHECK(era.pearson_log_impact->value >= prev);
    prev = era.pearson_log_impact->value;
  }
}

TEST_CASE("a corpus without books has an absent books correlation") {
  CorpusBuilder cb;
  cb.node("a", 1990, "A");
  cb.node("b", 1995, "A");
  cb.node("c", 1999, "A");
  cb.cite("a", "b");
  cb.cite("a", "c");
  cb.cite("b", "c");
  const auto g = cb.build();
  const auto study = citeflow::books_study(g);
  CHECK(study.book_edges == 0);
  CHECK_FALSE(study.books.has_value());
  CHECK(study.paper_edges == 3);
}

TEST_CASE("books reaching further back collect fewer planted citations") {
  // Book i cites i+1 years into the past and receives 8-i citations: span and
  // citation count are exactly anti-monotone, so rho(span, outdeg) = -1.
  CorpusBuilder cb;
  const int n_books = 8;
  for (int i = 0; i < n_books; ++i)
    cb.node("book" + std::to_string(i), 1995, "A", DocKind::Book);
  for (int i = 0; i < n_books; ++i)
    cb.node("src" + std::to_string(i), 1995 - (i + 1), "A");
  // book i cites a source i+1 years back: span grows with i.
  for (int i = 0; i < n_books; ++i)
    cb.cite("src" + std::to_string(i), "book" + std::to_string(i));
  // book i is cited 8-i times: larger span pairs with fewer citations.
  int citer = 0;
  for (int i = 0; i < n_books; ++i)
    for (int c = 0; c < n_books - i; ++c) {
      cb.node("citer" + std::to_string(citer), 2000, "A");
      cb.cite("book" + std::to_string(i), "citer" + std::to_string(citer));
      ++citer;
    }
  const auto g = cb.build();
  const auto study = citeflow::books_study(g);
  REQUIRE(study.books.has_value());
  CHECK(study.books->value == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(study.book_edges == n_books);
}

TEST_CASE("study correlations survive monotone transforms of impact") {
  std::mt19937_64 rng(909);
  EdgeStudyTable table;
  EdgeStudyTable cubed;
  for (int i = 0; i < 50; ++i) {
    const double w = static_cast<double>(rng() % 200) / 100.0 - 1.0;
    const double imp = 0.1 + static_cast<double>(rng() % 300) / 100.0;
    auto r = row(w, imp);
    r.time_diff = static_cast<double>(1 + rng() % 25);
    table.rows.push_back(r);
    auto r3 = r;
    r3.citing_impact = imp * imp * imp;
    cubed.rows.push_back(r3);
  }
  const auto a = overall_correlations(table);
  const auto b = overall_correlations(cubed);
  REQUIRE(a.c_weight.has_value());
  REQUIRE(b.c_weight.has_value());
  CHECK(a.c_weight->value == b.c_weight->value);
  CHECK(a.time_diff->value == b.time_diff->value);
}

TEST_CASE("recency-coupled synthetic corpora show negative time correlation") {
  citeflow::GenConfig config;
  config.n_nodes = 20000;
  config.refs_per_paper = 3.4;
  config.impact_couplings.weight_effect = 0.8;
  config.impact_couplings.recency_effect = -0.15;
  config.seed = 42;
  const auto corpus = citeflow::generate(config);
  std::vector<std::optional<std::string>> labels;
  for (const auto& r : corpus.records) labels.emplace_back(r.venue);
  citeflow::GraphBuildOptions options;
  options.valid_years = config.years;
  const auto g = build_graph(corpus.records, corpus.edges, options, labels);

  const auto weights = community_weights(count_matrix(g));
  const auto impacts = normalized_impact(g);
  const auto table = edge_study(g, weights, impacts, StudyFilter::none());
  const auto overall = overall_correlations(table);
  REQUIRE(overall.time_diff.has_value());
  REQUIRE(overall.time_diff->p_value.has_value());
  CHECK(overall.time_diff->value < 0.0);
  CHECK(*overall.time_diff->p_value < 0.05);
}
