#include "citeflow/graph.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "citeflow/io.hpp"
#include "graph_assembler.hpp"

namespace citeflow {

namespace detail {

CitationGraph GraphAssembler::assemble(std::vector<std::string> external_ids,
                                       std::vector<std::int32_t> years,
                                       std::vector<DocKind> kinds,
                                       std::vector<std::int16_t> community,
                                       std::vector<std::string> labels,
                                       std::vector<std::pair<NodeId, NodeId>> edges,
                                       YearRange valid_years) {
  const std::size_t n = external_ids.size();
  const std::size_t m = edges.size();

  CitationGraph g;
  g.external_ids_ = std::move(external_ids);
  g.years_ = std::move(years);
  g.kinds_ = std::move(kinds);
  g.community_ = std::move(community);
  g.labels_ = std::move(labels);
  g.valid_years_ = valid_years;

  std::sort(edges.begin(), edges.end());

  g.fwd_offsets_.assign(n + 1, 0);
  for (const auto& [u, v] : edges) g.fwd_offsets_[u + 1]++;
  for (std::size_t i = 0; i < n; ++i) g.fwd_offsets_[i + 1] += g.fwd_offsets_[i];
  g.fwd_targets_.resize(m);
  g.fwd_spans_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    g.fwd_targets_[i] = edges[i].second;
    g.fwd_spans_[i] = g.years_[edges[i].second] - g.years_[edges[i].first];
  }

  // Transpose: scanning edges sorted by (cited, citing) appends each node's
  // references in ascending cited order.
  g.rev_offsets_.assign(n + 1, 0);
  for (const auto& [u, v] : edges) g.rev_offsets_[v + 1]++;
  for (std::size_t i = 0; i < n; ++i) g.rev_offsets_[i + 1] += g.rev_offsets_[i];
  g.rev_targets_.resize(m);
  std::vector<std::uint64_t> cursor(g.rev_offsets_.begin(), g.rev_offsets_.end() - 1);
  for (const auto& [u, v] : edges) g.rev_targets_[cursor[v]++] = u;

  return g;
}

CitationGraph GraphAssembler::from_csr(std::vector<std::string> external_ids,
                                       std::vector<std::int32_t> years,
                                       std::vector<DocKind> kinds,
                                       std::vector<std::int16_t> community,
                                       std::vector<std::string> labels,
                                       std::vector<std::uint64_t> fwd_offsets,
                                       std::vector<NodeId> fwd_targets,
                                       std::vector<std::uint64_t> rev_offsets,
                                       std::vector<NodeId> rev_targets, YearRange valid_years) {
  const std::size_t n = external_ids.size();
  const std::size_t m = fwd_targets.size();
  const auto check_csr = [n, m](const std::vector<std::uint64_t>& offsets,
                                const std::vector<NodeId>& targets, const char* which) {
    if (offsets.size() != n + 1 || offsets.front() != 0 || offsets.back() != m) {
      throw DataError(std::string("snapshot: corrupt ") + which + " offset array");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (offsets[i] > offsets[i + 1]) {
        throw DataError(std::string("snapshot: non-monotone ") + which + " offsets");
      }
    }
    for (NodeId t : targets) {
      if (t >= n) throw DataError(std::string("snapshot: out-of-range ") + which + " target");
    }
  };
  check_csr(fwd_offsets, fwd_targets, "forward");
  check_csr(rev_offsets, rev_targets, "reverse");
  for (std::int16_t c : community) {
    if (c < -1 || (c >= 0 && static_cast<std::size_t>(c) >= labels.size())) {
      throw DataError("snapshot: community index out of range");
    }
  }

  CitationGraph g;
  g.external_ids_ = std::move(external_ids);
  g.years_ = std::move(years);
  g.kinds_ = std::move(kinds);
  g.community_ = std::move(community);
  g.labels_ = std::move(labels);
  g.valid_years_ = valid_years;
  g.fwd_offsets_ = std::move(fwd_offsets);
  g.fwd_targets_ = std::move(fwd_targets);
  g.rev_offsets_ = std::move(rev_offsets);
  g.rev_targets_ = std::move(rev_targets);

  g.fwd_spans_.resize(m);
  for (NodeId u = 0; u < n; ++u) {
    for (std::uint64_t i = g.fwd_offsets_[u]; i < g.fwd_offsets_[u + 1]; ++i) {
      g.fwd_spans_[i] = g.years_[g.fwd_targets_[i]] - g.years_[u];
    }
  }
  return g;
}

}  // namespace detail

NodeId CitationGraph::find(std::string_view external_id) const {
  const auto it = std::lower_bound(external_ids_.begin(), external_ids_.end(), external_id);
  if (it == external_ids_.end() || *it != external_id) return kNoNode;
  return static_cast<NodeId>(it - external_ids_.begin());
}

CitationGraph build_graph(std::span<const RawRecord> records,
                          std::span<const std::pair<std::string, std::string>> edges,
                          const GraphBuildOptions& options,
                          std::span<const std::optional<std::string>> communities,
                          GraphBuildReport* report) {
  if (!communities.empty() && communities.size() != records.size()) {
    throw std::invalid_argument("build_graph: communities not parallel to records");
  }
  GraphBuildReport local;

  // Select usable records.
  std::vector<std::uint32_t> kept;
  kept.reserve(records.size());
  for (std::uint32_t i = 0; i < records.size(); ++i) {
    const RawRecord& r = records[i];
    if (!r.year) {
      if (options.strict) {
        throw DataError("build_graph: record '" + r.external_id + "' has no year");
      }
      ++local.dropped_noyear_nodes;
      continue;
    }
    if (!options.valid_years.contains(*r.year)) {
      if (options.strict) {
        throw DataError("build_graph: record '" + r.external_id + "' year " +
                        std::to_string(*r.year) + " outside valid range");
      }
      ++local.dropped_range_nodes;
      continue;
    }
    kept.push_back(i);
  }
  if (kept.size() > 0xfffffffeull) throw DataError("build_graph: too many nodes");

  // Dense ids follow external-id order so the build is input-order
  // independent.
  std::sort(kept.begin(), kept.end(), [&](std::uint32_t a, std::uint32_t b) {
    return records[a].external_id < records[b].external_id;
  });
  for (std::size_t i = 1; i < kept.size(); ++i) {
    if (records[kept[i - 1]].external_id == records[kept[i]].external_id) {
      throw DataError("build_graph: duplicate external id '" + records[kept[i]].external_id +
                      "'");
    }
  }

  const NodeId n = static_cast<NodeId>(kept.size());
  std::vector<std::string> ids(n);
  std::vector<std::int32_t> years(n);
  std::vector<DocKind> kinds(n);
  std::unordered_map<std::string_view, NodeId> id_of;
  id_of.reserve(n * 2);
  for (NodeId v = 0; v < n; ++v) {
    const RawRecord& r = records[kept[v]];
    ids[v] = r.external_id;
    years[v] = *r.year;
    kinds[v] = r.kind;
    id_of.emplace(std::string_view(ids[v]), v);
  }

  // Community labels: sorted distinct labels of kept records.
  std::vector<std::string> labels;
  std::vector<std::int16_t> community;
  if (!communities.empty()) {
    for (NodeId v = 0; v < n; ++v) {
      const auto& c = communities[kept[v]];
      if (c) labels.push_back(*c);
    }
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    if (labels.size() > 0x7fff) throw DataError("build_graph: too many community labels");
    if (!labels.empty()) {
      community.assign(n, -1);
      for (NodeId v = 0; v < n; ++v) {
        const auto& c = communities[kept[v]];
        if (!c) continue;
        const auto it = std::lower_bound(labels.begin(), labels.end(), *c);
        community[v] = static_cast<std::int16_t>(it - labels.begin());
      }
    }
  }

  std::vector<std::pair<NodeId, NodeId>> pairs;
  pairs.reserve(edges.size());
  for (const auto& [cited, citing] : edges) {
    const auto it_u = id_of.find(std::string_view(cited));
    const auto it_v = id_of.find(std::string_view(citing));
    if (it_u == id_of.end() || it_v == id_of.end()) {
      if (options.strict) {
        throw DataError("build_graph: edge endpoint '" +
                        (it_u == id_of.end() ? cited : citing) + "' does not resolve");
      }
      ++local.dangling_edges;
      continue;
    }
    if (it_u->second == it_v->second) {
      ++local.self_loops;
      continue;
    }
    pairs.emplace_back(it_u->second, it_v->second);
  }
  std::sort(pairs.begin(), pairs.end());
  const auto last = std::unique(pairs.begin(), pairs.end());
  local.duplicate_edges = static_cast<std::uint64_t>(pairs.end() - last);
  pairs.erase(last, pairs.end());

  if (report) *report = local;
  return detail::GraphAssembler::assemble(std::move(ids), std::move(years), std::move(kinds),
                                          std::move(community), std::move(labels),
                                          std::move(pairs), options.valid_years);
}

std::vector<CitationEdge> time_violations(const CitationGraph& g) {
  std::vector<CitationEdge> out;
  g.for_each_edge([&](const CitationEdge& e) {
    if (e.time_span < 0) out.push_back(e);
  });
  return out;
}

namespace {

CitationGraph rebuild_with_edges(const CitationGraph& g,
                                 std::vector<std::pair<NodeId, NodeId>> pairs) {
  const NodeId n = g.node_count();
  std::vector<std::string> ids(n);
  std::vector<std::int32_t> years(n);
  std::vector<DocKind> kinds(n);
  std::vector<std::int16_t> community;
  if (g.community_labels().size() > 0) community.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    ids[v] = std::string(g.external_id(v));
    years[v] = g.year(v);
    kinds[v] = g.kind(v);
    if (!community.empty()) community[v] = g.community_index(v);
  }
  std::vector<std::string> labels(g.community_labels().begin(), g.community_labels().end());
  return detail::GraphAssembler::assemble(std::move(ids), std::move(years), std::move(kinds),
                                          std::move(community), std::move(labels),
                                          std::move(pairs), g.valid_years());
}

}  // namespace

CitationGraph drop_time_violations(const CitationGraph& g) {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  pairs.reserve(g.edge_count());
  g.for_each_edge([&](const CitationEdge& e) {
    if (e.time_span >= 0) pairs.emplace_back(e.cited, e.citing);
  });
  return rebuild_with_edges(g, std::move(pairs));
}

SubgraphResult induced_subgraph(const CitationGraph& g, std::span<const NodeId> node_set) {
  std::vector<NodeId> selected(node_set.begin(), node_set.end());
  std::sort(selected.begin(), selected.end());
  selected.erase(std::unique(selected.begin(), selected.end()), selected.end());
  for (NodeId v : selected) {
    if (v >= g.node_count()) {
      throw std::invalid_argument("induced_subgraph: unknown node id " + std::to_string(v));
    }
  }

  const NodeId sub_n = static_cast<NodeId>(selected.size());
  std::vector<NodeId> new_id(g.node_count(), kNoNode);
  for (NodeId s = 0; s < sub_n; ++s) new_id[selected[s]] = s;

  std::vector<std::string> ids(sub_n);
  std::vector<std::int32_t> years(sub_n);
  std::vector<DocKind> kinds(sub_n);
  std::vector<std::int16_t> community;
  if (g.community_labels().size() > 0) community.resize(sub_n);
  for (NodeId s = 0; s < sub_n; ++s) {
    const NodeId v = selected[s];
    ids[s] = std::string(g.external_id(v));
    years[s] = g.year(v);
    kinds[s] = g.kind(v);
    if (!community.empty()) community[s] = g.community_index(v);
  }

  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId v : selected) {
    for (NodeId w : g.citers(v)) {
      if (new_id[w] != kNoNode) pairs.emplace_back(new_id[v], new_id[w]);
    }
  }

  std::vector<std::string> labels(g.community_labels().begin(), g.community_labels().end());
  SubgraphResult result;
  result.graph = detail::GraphAssembler::assemble(std::move(ids), std::move(years),
                                                  std::move(kinds), std::move(community),
                                                  std::move(labels), std::move(pairs),
                                                  g.valid_years());
  result.original_ids = std::move(selected);
  return result;
}

namespace {

constexpr char kMagic[5] = {'C', 'G', 'R', 'F', '1'};

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_i32(std::string& out, std::int32_t v) { put_u32(out, static_cast<std::uint32_t>(v)); }
void put_i16(std::string& out, std::int16_t v) {
  const auto u = static_cast<std::uint16_t>(v);
  out.push_back(static_cast<char>(u & 0xff));
  out.push_back(static_cast<char>((u >> 8) & 0xff));
}
void put_str(std::string& out, std::string_view s) {
  put_u64(out, s.size());
  out.append(s.data(), s.size());
}

struct SnapshotReader {
  std::string_view buf;
  std::size_t pos = 0;

  void need(std::size_t bytes) {
    if (pos + bytes > buf.size()) throw DataError("snapshot: truncated file");
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::int16_t i16() {
    need(2);
    std::uint16_t v = static_cast<unsigned char>(buf[pos]);
    v = static_cast<std::uint16_t>(v | (static_cast<unsigned char>(buf[pos + 1]) << 8));
    pos += 2;
    return static_cast<std::int16_t>(v);
  }
  std::string str() {
    const std::uint64_t len = u64();
    if (len > buf.size() - pos) throw DataError("snapshot: truncated string");
    std::string s(buf.substr(pos, len));
    pos += len;
    return s;
  }
};

}  // namespace

void save_snapshot(const CitationGraph& g, const std::string& path,
                   const SnapshotProvenance& provenance) {
  const NodeId n = g.node_count();
  const std::uint64_t m = g.edge_count();
  const auto labels = g.community_labels();

  std::string out;
  out.reserve(64 + n * 24 + m * 8);
  out.append(kMagic, sizeof kMagic);
  put_u64(out, n);
  put_u64(out, m);
  put_u64(out, labels.size());
  for (const std::string& label : labels) put_str(out, label);
  for (NodeId v = 0; v < n; ++v) put_str(out, g.external_id(v));
  for (NodeId v = 0; v < n; ++v) put_i32(out, g.year(v));
  for (NodeId v = 0; v < n; ++v) out.push_back(static_cast<char>(g.kind(v)));
  for (NodeId v = 0; v < n; ++v) put_i16(out, g.community_index(v));
  put_i32(out, g.valid_years().first);
  put_i32(out, g.valid_years().last);

  std::uint64_t running = 0;
  put_u64(out, 0);
  for (NodeId v = 0; v < n; ++v) {
    running += g.citers(v).size();
    put_u64(out, running);
  }
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId t : g.citers(v)) put_u32(out, t);
  }
  running = 0;
  put_u64(out, 0);
  for (NodeId v = 0; v < n; ++v) {
    running += g.references(v).size();
    put_u64(out, running);
  }
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId t : g.references(v)) put_u32(out, t);
  }
  write_file(path, out);

  nlohmann::json side;
  side["format"] = "CGRF1";
  side["tool_version"] = std::string(kToolVersion);
  side["nodes"] = n;
  side["edges"] = m;
  side["communities"] = labels.size();
  nlohmann::json hashes = nlohmann::json::object();
  for (const auto& [name, hex] : provenance.input_hashes) hashes[name] = hex;
  side["input_hashes"] = hashes;
  nlohmann::json drops = nlohmann::json::object();
  for (const auto& [name, count] : provenance.drop_counts) drops[name] = count;
  side["drop_counts"] = drops;
  write_file(path + ".json", side.dump(2) + "\n");
}

CitationGraph load_snapshot(const std::string& path) {
  const std::string buf = read_file(path);
  SnapshotReader r{buf};
  r.need(sizeof kMagic);
  if (std::memcmp(buf.data(), kMagic, sizeof kMagic) != 0) {
    throw DataError(path + ": not a CGRF1 snapshot");
  }
  r.pos = sizeof kMagic;

  const std::uint64_t n = r.u64();
  const std::uint64_t m = r.u64();
  const std::uint64_t n_labels = r.u64();
  if (n > 0xfffffffeull) throw DataError("snapshot: node count out of range");
  if (n_labels > 0x7fff) throw DataError("snapshot: label count out of range");

  std::vector<std::string> labels(n_labels);
  for (auto& label : labels) label = r.str();
  std::vector<std::string> ids(n);
  for (auto& id : ids) id = r.str();
  std::vector<std::int32_t> years(n);
  for (auto& y : years) y = r.i32();
  std::vector<DocKind> kinds(n);
  for (auto& k : kinds) {
    r.need(1);
    const unsigned char raw = static_cast<unsigned char>(buf[r.pos++]);
    if (raw > 3) throw DataError("snapshot: bad kind byte");
    k = static_cast<DocKind>(raw);
  }
  std::vector<std::int16_t> community(n);
  bool any_label = false;
  for (auto& c : community) {
    c = r.i16();
    any_label |= c >= 0;
  }
  if (!any_label && n_labels == 0) community.clear();
  YearRange valid_years{r.i32(), r.i32()};

  std::vector<std::uint64_t> fwd_offsets(n + 1);
  for (auto& o : fwd_offsets) o = r.u64();
  std::vector<NodeId> fwd_targets(m);
  for (auto& t : fwd_targets) t = r.u32();
  std::vector<std::uint64_t> rev_offsets(n + 1);
  for (auto& o : rev_offsets) o = r.u64();
  std::vector<NodeId> rev_targets(m);
  for (auto& t : rev_targets) t = r.u32();
  if (r.pos != buf.size()) throw DataError("snapshot: trailing bytes");

  return detail::GraphAssembler::from_csr(std::move(ids), std::move(years), std::move(kinds),
                                          std::move(community), std::move(labels),
                                          std::move(fwd_offsets), std::move(fwd_targets),
                                          std::move(rev_offsets), std::move(rev_targets),
                                          valid_years);
}

}  // namespace citeflow
