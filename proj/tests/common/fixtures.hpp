// Shared helpers for building small in-memory corpora and graphs in tests.
#pragma once

#include <citeflow/corpus.hpp>
#include <citeflow/graph.hpp>

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fixtures {

struct NodeSpec {
  std::string id;
  int year = 2000;
  std::optional<std::string> venue;
  citeflow::DocKind kind = citeflow::DocKind::Paper;
};

inline citeflow::RawRecord record(NodeSpec spec) {
  citeflow::RawRecord r;
  r.external_id = std::move(spec.id);
  r.year = spec.year;
  r.venue = std::move(spec.venue);
  r.kind = spec.kind;
  return r;
}

inline std::vector<citeflow::RawRecord> records(std::vector<NodeSpec> specs) {
  std::vector<citeflow::RawRecord> out;
  out.reserve(specs.size());
  for (auto& s : specs) out.push_back(record(std::move(s)));
  return out;
}

// Nodes n0..n{count-1}, all in `year` unless years are given per node.
// Edges are (cited index, citing index) pairs.
inline citeflow::CitationGraph graph_from(
    int count, const std::vector<std::pair<int, int>>& edges,
    const std::vector<int>& years = {},
    const std::vector<std::string>& communities = {},
    citeflow::GraphBuildOptions options = {}) {
  std::vector<citeflow::RawRecord> recs;
  std::vector<std::pair<std::string, std::string>> edge_ids;
  recs.reserve(count);
  auto name = [](int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "n%03d", i);
    return std::string(buf);
  };
  for (int i = 0; i < count; ++i) {
    citeflow::RawRecord r;
    r.external_id = name(i);
    r.year = years.empty() ? 2000 : years[static_cast<std::size_t>(i)];
    r.kind = citeflow::DocKind::Paper;
    recs.push_back(std::move(r));
  }
  edge_ids.reserve(edges.size());
  for (const auto& [a, b] : edges) edge_ids.emplace_back(name(a), name(b));
  std::vector<std::optional<std::string>> labels;
  labels.reserve(communities.size());
  for (const auto& c : communities) {
    if (c.empty())
      labels.emplace_back();
    else
      labels.emplace_back(c);
  }
  return citeflow::build_graph(recs, edge_ids, options, labels);
}

// Fresh per-test scratch directory under the system temp root. Removed on
// construction so reruns start clean; left behind afterwards for debugging.
struct ScratchDir {
  std::filesystem::path path;

  explicit ScratchDir(const std::string& name) {
    path = std::filesystem::temp_directory_path() / "citeflow_tests" / name;
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }

  std::string file(const std::string& leaf) const {
    return (path / leaf).string();
  }
};

}  // namespace fixtures
