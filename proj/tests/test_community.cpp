#include <citeflow/community.hpp>
#include <citeflow/graph.hpp>
#include <citeflow/io.hpp>

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "common/fixtures.hpp"

using citeflow::CommunityMatrix;
using citeflow::community_weights;
using citeflow::count_matrix;
using citeflow::CountReport;
using citeflow::DataError;
using citeflow::edge_weight_lookup;
using citeflow::export_heatmap;
using citeflow::matrix_from_counts;
using citeflow::try_edge_weight;
using citeflow::WeightLookupStatus;
using fixtures::ScratchDir;

namespace {

// Two hubs (one per community) cited by dedicated citer pools, giving exact
// control of each cell of the count matrix.
citeflow::CitationGraph two_community_graph() {
  std::vector<citeflow::RawRecord> recs;
  std::vector<std::optional<std::string>> labels;
  auto add = [&](std::string id, int year, const char* community) {
    citeflow::RawRecord r;
    r.external_id = std::move(id);
    r.year = year;
    recs.push_back(std::move(r));
    if (community)
      labels.emplace_back(community);
    else
      labels.emplace_back();
  };
  add("hubA", 1990, "A");
  add("hubB", 1990, "B");
  for (int i = 1; i <= 8; ++i) add("a" + std::to_string(i), 2000, "A");
  for (int i = 1; i <= 8; ++i) add("b" + std::to_string(i), 2000, "B");

  std::vector<std::pair<std::string, std::string>> edges;
  for (int i = 1; i <= 8; ++i) edges.emplace_back("hubA", "a" + std::to_string(i));
  for (int i = 1; i <= 2; ++i) edges.emplace_back("hubA", "b" + std::to_string(i));
  for (int i = 1; i <= 2; ++i) edges.emplace_back("hubB", "a" + std::to_string(i));
  for (int i = 1; i <= 8; ++i) edges.emplace_back("hubB", "b" + std::to_string(i));
  return citeflow::build_graph(recs, edges, {}, labels);
}

std::vector<std::string> rect_fills(const std::string& svg) {
  std::vector<std::string> fills;
  std::size_t pos = 0;
  while ((pos = svg.find("fill=\"#", pos)) != std::string::npos) {
    fills.push_back(svg.substr(pos + 6, 7));
    pos += 7;
  }
  return fills;
}

double luminance(const std::string& hex) {
  const int r = std::stoi(hex.substr(1, 2), nullptr, 16);
  const int g = std::stoi(hex.substr(3, 2), nullptr, 16);
  const int b = std::stoi(hex.substr(5, 2), nullptr, 16);
  return 0.299 * r + 0.587 * g + 0.114 * b;
}

}  // namespace

TEST_CASE("three one-way citations land in a single off-diagonal cell") {
  std::vector<citeflow::RawRecord> recs;
  std::vector<std::optional<std::string>> labels;
  for (int i = 0; i < 4; ++i) {
    citeflow::RawRecord r;
    r.external_id = "p" + std::to_string(i);
    r.year = 1990 + i;
    recs.push_back(std::move(r));
    labels.emplace_back(i == 0 ? "X" : "Y");
  }
  const std::vector<std::pair<std::string, std::string>> edges{
      {"p0", "p1"}, {"p0", "p2"}, {"p0", "p3"}};
  const auto g = citeflow::build_graph(recs, edges, {}, labels);
  const auto m = count_matrix(g);
  REQUIRE(m.size() == 2);
  REQUIRE(m.labels == std::vector<std::string>{"X", "Y"});
  CHECK(m.count(0, 1) == 3);
  CHECK(m.count(0, 0) == 0);
  CHECK(m.count(1, 0) == 0);
  CHECK(m.count(1, 1) == 0);
  CHECK(m.total == 3);
}

TEST_CASE("citations inside one community fill only the diagonal") {
  std::vector<citeflow::RawRecord> recs;
  std::vector<std::optional<std::string>> labels;
  for (int i = 0; i < 5; ++i) {
    citeflow::RawRecord r;
    r.external_id = "p" + std::to_string(i);
    r.year = 1990 + i;
    recs.push_back(std::move(r));
    labels.emplace_back(i < 4 ? "Same" : "Other");
  }
  const std::vector<std::pair<std::string, std::string>> edges{
      {"p0", "p1"}, {"p1", "p2"}, {"p0", "p3"}};
  const auto g = citeflow::build_graph(recs, edges, {}, labels);
  const auto m = count_matrix(g);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      CHECK(m.count(i, j) == (m.labels[i] == "Same" && i == j ? 3u : 0u));
}

TEST_CASE("edges touching unlabeled papers are dropped and counted") {
  std::vector<citeflow::RawRecord> recs;
  std::vector<std::optional<std::string>> labels;
  for (int i = 0; i < 3; ++i) {
    citeflow::RawRecord r;
    r.external_id = "p" + std::to_string(i);
    r.year = 1990 + i;
    recs.push_back(std::move(r));
    labels.emplace_back(i == 2 ? std::optional<std::string>{}
                               : std::optional<std::string>{"A"});
  }
  const std::vector<std::pair<std::string, std::string>> edges{
      {"p0", "p1"}, {"p0", "p2"}};
  const auto g = citeflow::build_graph(recs, edges, {}, labels);
  CountReport report;
  const auto m = count_matrix(g, &report);
  CHECK(report.counted_edges == 1);
  CHECK(report.dropped_unlabeled == 1);
  CHECK(m.total == 1);
}

TEST_CASE("uniform flow has zero deviation everywhere") {
  const auto m = community_weights(
      matrix_from_counts({"A", "B"}, {5, 5, 5, 5}));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      REQUIRE(m.weight_defined(i, j));
      CHECK(m.weight(i, j) == doctest::Approx(0.0).epsilon(1e-15));
    }
}

TEST_CASE("a diagonal-heavy 2x2 matrix deviates by exactly 3/sqrt(5)") {
  const auto m = community_weights(
      matrix_from_counts({"A", "B"}, {8, 2, 2, 8}));
  const double expect = 3.0 / std::sqrt(5.0);
  CHECK(std::fabs(m.weight(0, 0) - expect) < 1e-12);
  CHECK(std::fabs(m.weight(1, 1) - expect) < 1e-12);
  CHECK(std::fabs(m.weight(0, 1) + expect) < 1e-12);
  CHECK(std::fabs(m.weight(1, 0) + expect) < 1e-12);
}

TEST_CASE("a single community always deviates by zero from itself") {
  const auto m = community_weights(matrix_from_counts({"Solo"}, {7}));
  REQUIRE(m.size() == 1);
  CHECK(m.weight(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("cells in an empty row or column are reported absent") {
  // Community C neither cites nor is cited.
  const auto m = community_weights(
      matrix_from_counts({"A", "B", "C"}, {4, 1, 0, 2, 3, 0, 0, 0, 0}));
  CHECK_FALSE(m.weight_defined(2, 0));
  CHECK_FALSE(m.weight_defined(0, 2));
  CHECK_FALSE(m.weight_defined(2, 2));
  CHECK(m.weight_defined(0, 0));
  CHECK(std::isnan(m.weight(2, 2)));
  double out = 0;
  CHECK(try_edge_weight(m, 2, 0, out) == WeightLookupStatus::AbsentCell);
  CHECK(try_edge_weight(m, -1, 0, out) == WeightLookupStatus::UnlabeledEndpoint);
  CHECK(try_edge_weight(m, 0, 1, out) == WeightLookupStatus::Ok);
}

TEST_CASE("row and column weighted sums vanish on random matrices") {
  std::mt19937_64 rng(4040);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t c = 1 + rng() % 12;
    std::vector<std::string> labels(c);
    for (std::size_t i = 0; i < c; ++i) labels[i] = "C" + std::to_string(i);
    std::vector<std::uint64_t> counts(c * c);
    for (auto& v : counts) v = rng() % 17;
    std::uint64_t total = 0;
    for (auto v : counts) total += v;
    if (total == 0) counts[0] = 1;

    const auto m = community_weights(matrix_from_counts(labels, counts));
    for (std::size_t i = 0; i < c; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < c; ++j)
        if (m.weight_defined(i, j)) row += m.weight(i, j) * std::sqrt(m.expected(i, j));
      CHECK(std::fabs(row) < 1e-9);
    }
    for (std::size_t j = 0; j < c; ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < c; ++i)
        if (m.weight_defined(i, j)) col += m.weight(i, j) * std::sqrt(m.expected(i, j));
      CHECK(std::fabs(col) < 1e-9);
    }
  }
}

TEST_CASE("relabeling communities permutes the weight matrix with them") {
  const std::vector<std::uint64_t> counts{9, 1, 2, 0, 4, 3, 5, 0, 6};
  const auto m = community_weights(matrix_from_counts({"A", "B", "C"}, counts));

  // Same flows described with rows/columns listed in a different order.
  const std::size_t perm[3] = {2, 0, 1};  // new index -> old index
  std::vector<std::uint64_t> permuted(9);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      permuted[i * 3 + j] = counts[perm[i] * 3 + perm[j]];
  const auto mp = community_weights(
      matrix_from_counts({"pC", "pA", "pB"}, permuted));

  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      REQUIRE(m.weight_defined(perm[i], perm[j]) == mp.weight_defined(i, j));
      if (mp.weight_defined(i, j))
        CHECK(mp.weight(i, j) ==
              doctest::Approx(m.weight(perm[i], perm[j])).epsilon(1e-12));
    }
}

TEST_CASE("scaling every count by k scales weights by sqrt(k)") {
  const std::vector<std::uint64_t> counts{8, 2, 2, 8};
  const auto base = community_weights(matrix_from_counts({"A", "B"}, counts));
  std::vector<std::uint64_t> scaled(counts);
  for (auto& v : scaled) v *= 9;
  const auto big = community_weights(matrix_from_counts({"A", "B"}, scaled));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(big.weight(i, j) ==
            doctest::Approx(3.0 * base.weight(i, j)).epsilon(1e-12));
}

TEST_CASE("edge weight lookup resolves through the graph's labels") {
  const auto g = two_community_graph();
  const auto m = community_weights(count_matrix(g));
  const double expect = 3.0 / std::sqrt(5.0);

  const auto hubA = g.find("hubA");
  const auto a1 = g.find("a1");
  const auto b1 = g.find("b1");
  CHECK(edge_weight_lookup(m, g, hubA, a1) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(edge_weight_lookup(m, g, hubA, b1) == doctest::Approx(-expect).epsilon(1e-12));
}

TEST_CASE("edge weight lookup rejects unlabeled endpoints") {
  std::vector<citeflow::RawRecord> recs;
  std::vector<std::optional<std::string>> labels;
  for (int i = 0; i < 3; ++i) {
    citeflow::RawRecord r;
    r.external_id = "p" + std::to_string(i);
    r.year = 1990 + i;
    recs.push_back(std::move(r));
  }
  labels = {std::optional<std::string>{"A"}, std::optional<std::string>{"A"},
            std::nullopt};
  const std::vector<std::pair<std::string, std::string>> edges{
      {"p0", "p1"}, {"p0", "p2"}};
  const auto g = citeflow::build_graph(recs, edges, {}, labels);
  const auto m = community_weights(count_matrix(g));
  CHECK_THROWS_AS(
      (void)edge_weight_lookup(m, g, g.find("p0"), g.find("p2")), DataError);
}

TEST_CASE("heatmap paints the diagonal darker for diagonal-heavy flow") {
  ScratchDir dir("heatmap_2x2");
  const auto m = community_weights(matrix_from_counts({"A", "B"}, {8, 2, 2, 8}));
  export_heatmap(m, dir.file("heat.svg"));
  const auto svg = citeflow::read_file(dir.file("heat.svg"));

  const auto fills = rect_fills(svg);
  REQUIRE(fills.size() == 4);  // row-major cells; background is keyword white
  CHECK(fills[0] == fills[3]);  // both diagonal cells
  CHECK(fills[1] == fills[2]);  // both off-diagonal cells
  CHECK(luminance(fills[0]) < luminance("#ffffff"));
  CHECK(luminance(fills[0]) < luminance(fills[1]));
}

TEST_CASE("an all-zero weight matrix renders as a uniform sheet") {
  ScratchDir dir("heatmap_flat");
  const auto m = community_weights(matrix_from_counts({"A", "B"}, {5, 5, 5, 5}));
  export_heatmap(m, dir.file("flat.svg"));
  const auto svg = citeflow::read_file(dir.file("flat.svg"));
  const auto fills = rect_fills(svg);
  REQUIRE(fills.size() == 4);
  for (const auto& f : fills) CHECK(f == fills[0]);
}

TEST_CASE("a 26-community heatmap renders every label and cell") {
  ScratchDir dir("heatmap_26");
  std::vector<std::string> labels(26);
  for (int i = 0; i < 26; ++i) labels[i] = std::string("Area ") + char('A' + i);
  std::mt19937_64 rng(606);
  std::vector<std::uint64_t> counts(26 * 26);
  for (auto& v : counts) v = rng() % 40;
  const auto m = community_weights(matrix_from_counts(labels, counts));
  export_heatmap(m, dir.file("big.svg"));
  const auto svg = citeflow::read_file(dir.file("big.svg"));

  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  std::size_t rects = 0;
  for (std::size_t pos = 0; (pos = svg.find("<rect", pos)) != std::string::npos;
       pos += 5)
    ++rects;
  CHECK(rects == 26 * 26 + 1);  // cells plus the background sheet
  for (const auto& label : labels) CHECK(svg.find(label) != std::string::npos);
}

TEST_CASE("weights CSV writes six decimals and NA for absent cells") {
  ScratchDir dir("weights_csv");
  const auto m = community_weights(
      matrix_from_counts({"A", "B", "C"}, {8, 2, 0, 2, 8, 0, 0, 0, 0}));
  citeflow::write_weights_csv(m, dir.file("w.csv"));
  const auto text = citeflow::read_file(dir.file("w.csv"));
  CHECK(text.find("1.341641") != std::string::npos);
  CHECK(text.find("-1.341641") != std::string::npos);
  CHECK(text.find("NA") != std::string::npos);
  CHECK(text.rfind("community,A,B,C", 0) == 0);
}

TEST_CASE("count matrix requires at least one labeled edge") {
  std::vector<citeflow::RawRecord> recs(2);
  recs[0].external_id = "p0";
  recs[0].year = 1990;
  recs[1].external_id = "p1";
  recs[1].year = 1991;
  const std::vector<std::pair<std::string, std::string>> edges{{"p0", "p1"}};
  const auto g = citeflow::build_graph(recs, edges);
  CHECK_THROWS_AS((void)count_matrix(g), DataError);
}
