// citeflow command line: corpus generation, ingest, graph snapshots, and the
// downstream analyses. Every subcommand writes its artifacts plus a
// <name>.manifest.json run record; manifests carry timestamps, everything
// else is byte-reproducible for a fixed input and flag set.

#include <citeflow/cascade.hpp>
#include <citeflow/community.hpp>
#include <citeflow/corpus.hpp>
#include <citeflow/graph.hpp>
#include <citeflow/impact.hpp>
#include <citeflow/io.hpp>
#include <citeflow/stats.hpp>
#include <citeflow/structure.hpp>
#include <citeflow/synth.hpp>
#include <citeflow/types.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "manifest.hpp"
#include "svg_scatter.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace citeflow;
using cli::RunManifest;
using cli::Stopwatch;

namespace {

YearRange parse_year_range(const std::string& s) {
  const auto parts = split(s, ':');
  YearRange r{};
  if (parts.size() != 2 || !parse_i32(trim(parts[0]), r.first) ||
      !parse_i32(trim(parts[1]), r.last) || !r.valid()) {
    throw std::invalid_argument("expected a year range FIRST:LAST, got '" + s + "'");
  }
  return r;
}

std::vector<YearRange> parse_eras(const std::string& s) {
  std::vector<YearRange> eras;
  for (const auto part : split(s, ',')) eras.push_back(parse_year_range(std::string(trim(part))));
  if (eras.empty()) throw std::invalid_argument("empty era list");
  return eras;
}

KindMask parse_kind_list(const std::string& s) {
  KindMask mask = KindMask::none();
  if (to_lower(trim(s)) == "none") return mask;
  for (const auto part : split(s, ',')) {
    DocKind kind{};
    if (!parse_doc_kind(trim(part), kind)) {
      throw std::invalid_argument("unknown document kind '" + std::string(trim(part)) + "'");
    }
    mask.add(kind);
  }
  return mask;
}

json json_corr(const std::optional<CorrelationResult>& c) {
  if (!c) return nullptr;
  json j;
  j["statistic"] = c->statistic == Statistic::Spearman ? "spearman" : "pearson";
  j["value"] = c->value;
  j["n"] = c->n;
  j["p_value"] = c->p_value ? json(*c->p_value) : json(nullptr);
  if (c->ci95) j["ci95"] = json::array({c->ci95->first, c->ci95->second});
  return j;
}

json json_components(const ComponentReport& c) {
  return json{{"scc_count", c.scc_count},
              {"largest_scc_size", c.largest_scc_size},
              {"wcc_count", c.wcc_count},
              {"largest_wcc_fraction", c.largest_wcc_fraction}};
}

void write_json(const std::string& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw DataError(path + ": invalid JSON: " + e.what());
  }
}

void write_histogram_csv(const std::string& path, const DegreeHistogram& h) {
  std::string out = "lower,count,fraction\n";
  for (const auto& b : h.bins) {
    out += std::to_string(b.lower);
    out += ',';
    out += std::to_string(b.count);
    out += ',';
    out += format_double(b.fraction);
    out += '\n';
  }
  write_file(path, out);
}

// Complementary CDF points (value, P(X >= value)) from an exact histogram.
std::vector<std::pair<double, double>> ccdf_points(const std::vector<HistogramBin>& bins) {
  std::vector<std::pair<double, double>> pts;
  double tail = 0;
  for (const auto& b : bins) tail += b.fraction;
  for (const auto& b : bins) {
    if (b.lower >= 1) pts.emplace_back(static_cast<double>(b.lower), tail);
    tail -= b.fraction;
  }
  return pts;
}

CitationGraph load_graph_input(const std::string& path) {
  if (!fs::exists(path)) throw DataError(path + ": no such file");
  return load_snapshot(path);
}

std::string out_path(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error(dir + ": cannot create directory: " + ec.message());
}

std::vector<std::string> collect_argv(int argc, char** argv) {
  std::vector<std::string> v;
  v.reserve(static_cast<std::size_t>(argc));
  for (int i = 0; i < argc; ++i) v.emplace_back(argv[i]);
  return v;
}

// ---------------------------------------------------------------- synth ----

struct SynthOpts {
  std::string out;
  std::uint64_t nodes = 10000;
  std::string years = "1980:2004";
  std::uint32_t n_communities = 8;
  double refs = 3.0;
  double pa = 1.0;
  double homophily = 0.6;
  double half_life = 8.0;
  double weight_effect = 0.0;
  double recency_effect = 0.0;
  std::uint64_t seed = 42;
};

void run_synth(const SynthOpts& o, RunManifest m) {
  Stopwatch sw;
  GenConfig cfg;
  cfg.n_nodes = o.nodes;
  cfg.years = parse_year_range(o.years);
  cfg.n_communities = o.n_communities;
  cfg.refs_per_paper = o.refs;
  cfg.pa_strength = o.pa;
  cfg.homophily = o.homophily;
  cfg.recency_half_life = o.half_life;
  cfg.impact_couplings = {o.weight_effect, o.recency_effect};
  cfg.seed = o.seed;

  GenReport rep;
  SynthCorpus corpus = generate(cfg, &rep);
  m.wall_seconds["generate"] = sw.lap();

  ensure_dir(o.out);
  const std::string nodes_path = out_path(o.out, "nodes.tsv");
  const std::string edges_path = out_path(o.out, "edges.tsv");
  const std::string map_path = out_path(o.out, "communities.map");
  write_nodes_file(nodes_path, corpus.records);
  write_edges_file(edges_path, corpus.edges);
  write_community_map(map_path, corpus.map);
  m.wall_seconds["write"] = sw.lap();

  m.settings = {{"nodes", o.nodes},         {"years", o.years},
                {"communities", o.n_communities}, {"refs_per_paper", o.refs},
                {"pa_strength", o.pa},      {"homophily", o.homophily},
                {"recency_half_life", o.half_life}, {"weight_effect", o.weight_effect},
                {"recency_effect", o.recency_effect}, {"seed", o.seed}};
  m.counts = {{"nodes", corpus.records.size()},
              {"edges", rep.edges},
              {"clipped_refs", rep.clipped_refs},
              {"duplicate_skips", rep.duplicate_skips}};
  m.outputs = {nodes_path, edges_path, map_path};
  m.write(out_path(o.out, "synth.manifest.json"));
  std::fprintf(stderr, "synth: %zu nodes, %llu edges -> %s\n", corpus.records.size(),
               static_cast<unsigned long long>(rep.edges), o.out.c_str());
}

// --------------------------------------------------------------- ingest ----

struct IngestOpts {
  std::string nodes, edges, communities, out;
  bool lenient = false;
  bool require_venue = false;
  std::string valid_years;  // empty = no range filter
};

void run_ingest(const IngestOpts& o, RunManifest m) {
  Stopwatch sw;
  LoadReport lrep;
  CorpusData data = load_corpus(o.nodes, o.edges, o.lenient, &lrep);
  const std::size_t input_nodes = data.records.size();
  const std::size_t input_edges = data.edges.size();

  std::optional<CommunityMap> map;
  if (!o.communities.empty()) map = load_community_map(o.communities);

  CleanPolicy policy;
  policy.require_venue = o.require_venue;
  if (!o.valid_years.empty()) policy.year_range = parse_year_range(o.valid_years);

  CleanReport crep;
  std::vector<RawRecord> kept =
      clean(std::move(data.records), policy, map ? &*map : nullptr, &crep);

  std::unordered_set<std::string_view> alive;
  alive.reserve(kept.size());
  for (const auto& r : kept) alive.insert(r.external_id);
  std::vector<std::pair<std::string, std::string>> surviving;
  surviving.reserve(data.edges.size());
  std::uint64_t edges_dropped_clean = 0;
  for (auto& e : data.edges) {
    if (alive.count(e.first) && alive.count(e.second)) surviving.push_back(std::move(e));
    else ++edges_dropped_clean;
  }
  m.wall_seconds["clean"] = sw.lap();

  ensure_dir(o.out);
  const std::string nodes_path = out_path(o.out, "nodes.tsv");
  const std::string edges_path = out_path(o.out, "edges.tsv");
  write_nodes_file(nodes_path, kept);
  write_edges_file(edges_path, surviving);

  json report{{"input_nodes", input_nodes},
              {"input_edges", input_edges},
              {"kept_nodes", kept.size()},
              {"kept_edges", surviving.size()},
              {"dropped_missing_year", crep.dropped_missing_year},
              {"dropped_unmatched_venue", crep.dropped_unmatched_venue},
              {"dropped_out_of_range", crep.dropped_out_of_range},
              {"dangling_edges_dropped", lrep.dangling_edges_dropped},
              {"edges_dropped_by_clean", edges_dropped_clean}};
  const std::string report_path = out_path(o.out, "ingest_report.json");
  write_json(report_path, report);
  m.wall_seconds["write"] = sw.lap();

  m.add_input(o.nodes);
  m.add_input(o.edges);
  if (!o.communities.empty()) m.add_input(o.communities);
  m.settings = {{"lenient", o.lenient},
                {"require_venue", o.require_venue},
                {"valid_years", o.valid_years}};
  m.counts = report;
  m.outputs = {nodes_path, edges_path, report_path};
  m.write(out_path(o.out, "ingest.manifest.json"));
  std::fprintf(stderr, "ingest: kept %zu/%zu nodes, %zu/%zu edges -> %s\n", kept.size(),
               input_nodes, surviving.size(), input_edges, o.out.c_str());
}

// ---------------------------------------------------------------- graph ----

struct GraphOpts {
  std::string nodes, edges, communities, out;
  std::string valid_years = "1900:2010";
  bool lenient = false;
};

void run_graph(const GraphOpts& o, RunManifest m) {
  Stopwatch sw;
  LoadReport lrep;
  CorpusData data = load_corpus(o.nodes, o.edges, o.lenient, &lrep);

  std::vector<std::optional<std::string>> communities;
  if (!o.communities.empty()) {
    const CommunityMap map = load_community_map(o.communities);
    communities = assign_communities(data.records, map);
  }
  m.wall_seconds["load"] = sw.lap();

  GraphBuildOptions opt;
  opt.valid_years = parse_year_range(o.valid_years);
  opt.strict = !o.lenient;
  GraphBuildReport rep;
  const CitationGraph g = build_graph(data.records, data.edges, opt, communities, &rep);
  m.wall_seconds["build"] = sw.lap();

  SnapshotProvenance prov;
  prov.input_hashes.emplace_back(o.nodes, to_hex64(fnv1a64_file(o.nodes)));
  prov.input_hashes.emplace_back(o.edges, to_hex64(fnv1a64_file(o.edges)));
  if (!o.communities.empty()) {
    prov.input_hashes.emplace_back(o.communities, to_hex64(fnv1a64_file(o.communities)));
  }
  prov.drop_counts = {{"dangling_edges_load", lrep.dangling_edges_dropped},
                      {"duplicate_edges", rep.duplicate_edges},
                      {"self_loops", rep.self_loops},
                      {"dangling_edges_build", rep.dangling_edges},
                      {"dropped_noyear_nodes", rep.dropped_noyear_nodes},
                      {"dropped_range_nodes", rep.dropped_range_nodes}};
  const fs::path out_file(o.out);
  if (out_file.has_parent_path()) ensure_dir(out_file.parent_path().string());
  save_snapshot(g, o.out, prov);
  m.wall_seconds["write"] = sw.lap();

  m.add_input(o.nodes);
  m.add_input(o.edges);
  if (!o.communities.empty()) m.add_input(o.communities);
  m.settings = {{"valid_years", o.valid_years}, {"lenient", o.lenient}};
  m.counts = {{"nodes", g.node_count()},
              {"edges", g.edge_count()},
              {"communities", g.community_labels().size()},
              {"duplicate_edges", rep.duplicate_edges},
              {"self_loops", rep.self_loops}};
  m.outputs = {o.out, o.out + ".json"};
  m.write(o.out + ".manifest.json");
  std::fprintf(stderr, "graph: %llu nodes, %llu edges -> %s\n",
               static_cast<unsigned long long>(g.node_count()),
               static_cast<unsigned long long>(g.edge_count()), o.out.c_str());
}

// ------------------------------------------------------------ structure ----

struct StructureOpts {
  std::string graph, out;
  std::int64_t geodesic_sources = -1;  // -1 auto, 0 exact, k > 0 sampled
  std::uint64_t geodesic_seed = 7;
  std::uint64_t exact_cap = 20000;
  std::string reach_years;  // empty = skip
  std::uint64_t top_k = 0;  // 0 = skip rich-club contrast
  std::uint64_t rich_seed = 99;
  unsigned threads = 0;
  bool svg = false;
};

void run_structure(const StructureOpts& o, RunManifest m) {
  Stopwatch sw;
  const CitationGraph g = load_graph_input(o.graph);
  m.wall_seconds["load"] = sw.lap();
  ensure_dir(o.out);

  json j;
  j["nodes"] = g.node_count();
  j["edges"] = g.edge_count();
  j["components"] = json_components(components(g));
  m.wall_seconds["components"] = sw.lap();

  const DegreeHistogram out_exact = degree_histogram(g, Direction::Out, KindMask::all(), Binning::Exact);
  const DegreeHistogram in_exact = degree_histogram(g, Direction::In, KindMask::all(), Binning::Exact);
  const DegreeHistogram out_log = degree_histogram(g, Direction::Out, KindMask::all(), Binning::Log2);
  const DegreeHistogram in_log = degree_histogram(g, Direction::In, KindMask::all(), Binning::Log2);
  write_histogram_csv(out_path(o.out, "degree_out_exact.csv"), out_exact);
  write_histogram_csv(out_path(o.out, "degree_in_exact.csv"), in_exact);
  write_histogram_csv(out_path(o.out, "degree_out_log2.csv"), out_log);
  write_histogram_csv(out_path(o.out, "degree_in_log2.csv"), in_log);

  double out_sum = 0, max_out = 0;
  for (const auto& b : out_exact.bins) {
    out_sum += static_cast<double>(b.lower) * static_cast<double>(b.count);
    max_out = std::max(max_out, static_cast<double>(b.lower));
  }
  double max_in = 0;
  for (const auto& b : in_exact.bins) max_in = std::max(max_in, static_cast<double>(b.lower));
  const double n = static_cast<double>(g.node_count());
  j["degrees"] = {{"mean", n > 0 ? out_sum / n : 0.0},
                  {"max_out", static_cast<std::uint64_t>(max_out)},
                  {"max_in", static_cast<std::uint64_t>(max_in)}};
  m.wall_seconds["degrees"] = sw.lap();

  GeodesicMethod method = GeodesicMethod::exact();
  if (o.geodesic_sources > 0) {
    method = GeodesicMethod::sampled(static_cast<std::uint64_t>(o.geodesic_sources),
                                     o.geodesic_seed);
  } else if (o.geodesic_sources < 0 && g.node_count() > o.exact_cap) {
    method = GeodesicMethod::sampled(std::min<std::uint64_t>(1000, g.node_count()),
                                     o.geodesic_seed);
  }
  const GeodesicReport geo = geodesics(g, method, o.exact_cap, o.threads);
  j["geodesics"] = {
      {"method", geo.method.kind == GeodesicMethod::Kind::Exact ? "exact" : "sampled"},
      {"sources", geo.method.sources},
      {"seed", geo.method.seed},
      {"mean_directed_distance",
       geo.mean_directed_distance ? json(*geo.mean_directed_distance) : json(nullptr)},
      {"max_observed", geo.max_observed},
      {"reachable_pairs", geo.reachable_pairs},
      {"reachable_pair_fraction", geo.reachable_pair_fraction}};
  m.wall_seconds["geodesics"] = sw.lap();

  if (!o.reach_years.empty()) {
    const YearRange seeds = parse_year_range(o.reach_years);
    j["backward_reach"] = {{"seed_years", json::array({seeds.first, seeds.last})},
                           {"fraction", backward_reach_fraction(g, seeds)}};
    m.wall_seconds["backward_reach"] = sw.lap();
  }

  if (o.top_k > 0) {
    const RichClubReport rc = top_cited_subgraph(g, o.top_k, o.rich_seed);
    j["rich_club"] = {{"k", o.top_k},
                      {"seed", rc.seed},
                      {"top_edges", rc.top_edges},
                      {"random_edges", rc.random_edges},
                      {"top_components", json_components(rc.top_components)},
                      {"random_components", json_components(rc.random_components)}};
    m.wall_seconds["rich_club"] = sw.lap();
  }

  const std::string json_path = out_path(o.out, "structure.json");
  write_json(json_path, j);
  m.outputs = {json_path,
               out_path(o.out, "degree_out_exact.csv"), out_path(o.out, "degree_in_exact.csv"),
               out_path(o.out, "degree_out_log2.csv"), out_path(o.out, "degree_in_log2.csv")};
  if (o.svg) {
    const std::string svg_path = out_path(o.out, "degree_ccdf.svg");
    write_file(svg_path, cli::svg_loglog_scatter("Citations received, tail distribution",
                                                 "citations", "P(X >= x)",
                                                 ccdf_points(out_exact.bins)));
    m.outputs.push_back(svg_path);
  }

  m.add_input(o.graph);
  m.settings = {{"geodesic_sources", o.geodesic_sources}, {"geodesic_seed", o.geodesic_seed},
                {"exact_cap", o.exact_cap},               {"reach_years", o.reach_years},
                {"top_k", o.top_k},                       {"threads", o.threads}};
  m.counts = {{"nodes", g.node_count()}, {"edges", g.edge_count()}};
  m.write(out_path(o.out, "structure.manifest.json"));
  std::fprintf(stderr, "structure: -> %s\n", o.out.c_str());
}

// ------------------------------------------------------------- cascades ----

struct CascadeOpts {
  std::string graph, out;
  unsigned threads = 0;
  bool svg = false;
};

void run_cascades(const CascadeOpts& o, RunManifest m) {
  Stopwatch sw;
  const CitationGraph g = load_graph_input(o.graph);
  m.wall_seconds["load"] = sw.lap();
  ensure_dir(o.out);

  const std::vector<CascadeStats> casc = all_cascades(g, o.threads);
  m.wall_seconds["cascades"] = sw.lap();

  std::string csv = "root,size,depth,leaves\n";
  csv.reserve(casc.size() * 24 + 32);
  for (const auto& c : casc) {
    csv += g.external_id(c.root);
    csv += ',';
    csv += std::to_string(c.size);
    csv += ',';
    csv += std::to_string(c.depth);
    csv += ',';
    csv += std::to_string(c.leaves);
    csv += '\n';
  }
  const std::string csv_path = out_path(o.out, "cascades.csv");
  write_file(csv_path, csv);

  std::vector<std::uint64_t> sizes(casc.size());
  std::vector<std::uint64_t> outdeg(g.node_count());
  for (std::size_t i = 0; i < casc.size(); ++i) sizes[i] = casc[i].size;
  for (NodeId v = 0; v < g.node_count(); ++v) outdeg[v] = g.out_degree(v);

  DegreeHistogram hist;
  hist.binning = Binning::Log2;
  hist.bins = bin_values(sizes, Binning::Log2);
  hist.total = sizes.size();
  const std::string hist_path = out_path(o.out, "cascade_size_hist.csv");
  write_histogram_csv(hist_path, hist);

  const CascadeCorrelations cc = cascade_correlations(casc, outdeg);
  json j{{"n", casc.size()},
         {"size_outdeg", json_corr(cc.size_outdeg)},
         {"size_depth", json_corr(cc.size_depth)},
         {"size_leaves", json_corr(cc.size_leaves)},
         {"depth_leaves", json_corr(cc.depth_leaves)}};
  const std::string json_path = out_path(o.out, "cascade_correlations.json");
  write_json(json_path, j);
  m.wall_seconds["write"] = sw.lap();

  m.outputs = {csv_path, hist_path, json_path};
  if (o.svg) {
    const std::string svg_path = out_path(o.out, "cascade_ccdf.svg");
    write_file(svg_path,
               cli::svg_loglog_scatter("Cascade sizes, tail distribution", "cascade size",
                                       "P(X >= x)", ccdf_points(bin_values(sizes, Binning::Exact))));
    m.outputs.push_back(svg_path);
  }
  m.add_input(o.graph);
  m.settings = {{"threads", o.threads}};
  m.counts = {{"cascades", casc.size()}};
  m.write(out_path(o.out, "cascades.manifest.json"));
  std::fprintf(stderr, "cascades: %zu roots -> %s\n", casc.size(), o.out.c_str());
}

// ---------------------------------------------------------- communities ----

struct CommunityOpts {
  std::string graph, out;
  bool svg = false;
};

void run_communities(const CommunityOpts& o, RunManifest m) {
  Stopwatch sw;
  const CitationGraph g = load_graph_input(o.graph);
  m.wall_seconds["load"] = sw.lap();
  ensure_dir(o.out);

  CountReport crep;
  CommunityMatrix matrix = community_weights(count_matrix(g, &crep));
  m.wall_seconds["matrix"] = sw.lap();

  const std::string counts_path = out_path(o.out, "community_counts.csv");
  const std::string weights_path = out_path(o.out, "community_weights.csv");
  write_counts_csv(matrix, counts_path);
  write_weights_csv(matrix, weights_path);

  json j{{"labels", matrix.labels},
         {"total", matrix.total},
         {"counted_edges", crep.counted_edges},
         {"dropped_unlabeled", crep.dropped_unlabeled},
         {"row_sums", matrix.row_sums},
         {"col_sums", matrix.col_sums}};
  const std::string json_path = out_path(o.out, "community_flow.json");
  write_json(json_path, j);

  m.outputs = {counts_path, weights_path, json_path};
  if (o.svg) {
    const std::string svg_path = out_path(o.out, "community_heatmap.svg");
    export_heatmap(matrix, svg_path);
    m.outputs.push_back(svg_path);
  }
  m.wall_seconds["write"] = sw.lap();
  m.add_input(o.graph);
  m.counts = {{"communities", matrix.labels.size()},
              {"counted_edges", crep.counted_edges},
              {"dropped_unlabeled", crep.dropped_unlabeled}};
  m.write(out_path(o.out, "communities.manifest.json"));
  std::fprintf(stderr, "communities: %zu labels, %llu edges counted -> %s\n",
               matrix.labels.size(), static_cast<unsigned long long>(crep.counted_edges),
               o.out.c_str());
}

// --------------------------------------------------------------- impact ----

struct ImpactOpts {
  std::string graph, out;
  std::string exclude_kinds = "book,chapter";
  std::uint64_t max_refs = 40;   // 0 disables
  std::int32_t max_year = 2000;  // 0 disables
  bool no_filter = false;
  double quantile = 0.9;
  std::string eras;  // empty = defaults
};

json json_study(const StudyCorrelations& sc) {
  return json{{"rows", sc.rows},
              {"time_diff", json_corr(sc.time_diff)},
              {"c_weight", json_corr(sc.c_weight)}};
}

void run_impact(const ImpactOpts& o, RunManifest m) {
  Stopwatch sw;
  const CitationGraph g = load_graph_input(o.graph);
  m.wall_seconds["load"] = sw.lap();
  ensure_dir(o.out);

  const ImpactResult impacts = normalized_impact(g);
  const CommunityMatrix weights = community_weights(count_matrix(g));
  m.wall_seconds["impact"] = sw.lap();

  StudyFilter filter;
  if (o.no_filter) {
    filter = StudyFilter::none();
  } else {
    filter.exclude_kinds = parse_kind_list(o.exclude_kinds);
    filter.max_refs = o.max_refs > 0 ? std::optional<std::uint64_t>(o.max_refs) : std::nullopt;
    filter.max_year = o.max_year != 0 ? std::optional<std::int32_t>(o.max_year) : std::nullopt;
  }
  const EdgeStudyTable table = edge_study(g, weights, impacts, filter);
  m.wall_seconds["study"] = sw.lap();

  std::string csv = "cited,citing,c_weight,time_diff,citing_impact,citing_year,citing_community\n";
  csv.reserve(table.rows.size() * 64 + 80);
  const auto labels = g.community_labels();
  for (const auto& r : table.rows) {
    csv += g.external_id(r.cited);
    csv += ',';
    csv += g.external_id(r.citing);
    csv += ',';
    csv += format_fixed(r.c_weight, 6);
    csv += ',';
    csv += format_double(r.time_diff);
    csv += ',';
    csv += format_double(r.citing_impact);
    csv += ',';
    csv += std::to_string(r.citing_year);
    csv += ',';
    csv += std::string(labels[static_cast<std::size_t>(r.citing_community)]);
    csv += '\n';
  }
  const std::string csv_path = out_path(o.out, "edge_study.csv");
  write_file(csv_path, csv);
  m.wall_seconds["write_rows"] = sw.lap();

  json j;
  j["filter"] = {{"exclude_kinds", o.no_filter ? "none" : o.exclude_kinds},
                 {"max_refs", o.no_filter ? 0 : o.max_refs},
                 {"max_year", o.no_filter ? 0 : o.max_year}};
  j["drops"] = {{"kind", table.dropped_kind},
                {"refs", table.dropped_refs},
                {"year", table.dropped_year},
                {"unlabeled", table.dropped_unlabeled},
                {"absent_cell", table.dropped_absent_cell},
                {"no_impact", table.dropped_no_impact}};
  j["impact_normalization"] = {{"records", impacts.records.size()},
                               {"excluded_zero_mean", impacts.excluded_zero_mean},
                               {"skipped_unlabeled", impacts.skipped_unlabeled}};

  if (table.rows.size() >= 3) {
    j["overall"] = json_study(overall_correlations(table));
  } else {
    j["overall"] = nullptr;
  }

  try {
    const SplitCorrelations split = split_correlations(table, o.quantile);
    j["split"] = {{"quantile", o.quantile},
                  {"threshold", split.threshold},
                  {"bottom_papers", split.bottom_papers},
                  {"top_papers", split.top_papers},
                  {"bottom", json_study(split.bottom)},
                  {"top", json_study(split.top)}};
  } catch (const std::invalid_argument& e) {
    j["split"] = {{"skipped", e.what()}};
  }

  auto by_comm = json::array();
  for (const auto& cc : by_community_correlations(table)) {
    by_comm.push_back({{"community", std::string(labels[static_cast<std::size_t>(cc.community)])},
                       {"stats", json_study(cc.correlations)}});
  }
  j["by_community"] = by_comm;

  const std::vector<YearRange> eras = o.eras.empty() ? default_eras() : parse_eras(o.eras);
  auto by_era = json::array();
  for (const auto& ec : by_era_correlations(table, eras)) {
    by_era.push_back({{"era", json::array({ec.era.first, ec.era.last})},
                      {"pearson_log_impact", json_corr(ec.pearson_log_impact)},
                      {"rows_used", ec.rows_used},
                      {"zero_impact_excluded", ec.zero_impact_excluded}});
  }
  j["by_era"] = by_era;

  const BooksStudy books = books_study(g);
  j["books"] = {{"books", json_corr(books.books)},
                {"papers", json_corr(books.papers)},
                {"book_edges", books.book_edges},
                {"paper_edges", books.paper_edges}};

  const std::string json_path = out_path(o.out, "impact_correlations.json");
  write_json(json_path, j);
  m.wall_seconds["correlate"] = sw.lap();

  m.add_input(o.graph);
  m.settings = {{"exclude_kinds", o.exclude_kinds}, {"max_refs", o.max_refs},
                {"max_year", o.max_year},           {"no_filter", o.no_filter},
                {"quantile", o.quantile},           {"eras", o.eras}};
  m.counts = {{"rows", table.rows.size()}, {"dropped", table.dropped_total()}};
  m.outputs = {csv_path, json_path};
  m.write(out_path(o.out, "impact.manifest.json"));
  std::fprintf(stderr, "impact: %zu study rows -> %s\n", table.rows.size(), o.out.c_str());
}

// --------------------------------------------------------------- report ----

struct ReportOpts {
  std::string dir = ".";
};

std::string md_corr(const json& c) {
  if (c.is_null()) return "(absent)";
  std::string s = (c["statistic"] == "pearson" ? "r = " : "rho = ") +
                  format_fixed(c["value"].get<double>(), 4);
  if (c.contains("ci95") && c["ci95"].is_array()) {
    s += " [" + format_fixed(c["ci95"][0].get<double>(), 4) + ", " +
         format_fixed(c["ci95"][1].get<double>(), 4) + "]";
  }
  s += ", n = " + std::to_string(c["n"].get<std::uint64_t>());
  if (!c["p_value"].is_null()) s += ", p = " + format_double(c["p_value"].get<double>());
  return s;
}

void run_report(const ReportOpts& o, RunManifest m) {
  Stopwatch sw;
  json combined = json::object();
  std::string md = "# Corpus analysis report\n";

  const auto section = [&](const char* file, const char* key) -> std::optional<json> {
    const std::string path = out_path(o.dir, file);
    if (!fs::exists(path)) return std::nullopt;
    json j = read_json(path);
    combined[key] = j;
    m.add_input(path);
    return j;
  };

  if (const auto ing = section("ingest_report.json", "ingest")) {
    md += "\n## Ingest\n\n";
    md += "| metric | value |\n|---|---|\n";
    for (const auto& key : {"input_nodes", "kept_nodes", "input_edges", "kept_edges"}) {
      if (ing->contains(key))
        md += "| " + std::string(key) + " | " + (*ing)[key].dump() + " |\n";
    }
  }

  if (const auto st = section("structure.json", "structure")) {
    md += "\n## Graph structure\n\n";
    md += "| metric | value |\n|---|---|\n";
    md += "| nodes | " + (*st)["nodes"].dump() + " |\n";
    md += "| edges | " + (*st)["edges"].dump() + " |\n";
    if (st->contains("components")) {
      const json& c = (*st)["components"];
      md += "| largest SCC | " + c["largest_scc_size"].dump() + " |\n";
      md += "| weak components | " + c["wcc_count"].dump() + " |\n";
      md += "| largest WCC fraction | " +
            format_fixed(c["largest_wcc_fraction"].get<double>(), 4) + " |\n";
    }
    if (st->contains("geodesics")) {
      const json& ge = (*st)["geodesics"];
      if (!ge["mean_directed_distance"].is_null()) {
        md += "| mean geodesic | " +
              format_fixed(ge["mean_directed_distance"].get<double>(), 2) + " |\n";
      }
      md += "| max geodesic | " + ge["max_observed"].dump() + " |\n";
      md += "| reachable pair fraction | " +
            format_double(ge["reachable_pair_fraction"].get<double>()) + " |\n";
    }
    if (st->contains("backward_reach")) {
      md += "| backward reach fraction | " +
            format_fixed((*st)["backward_reach"]["fraction"].get<double>(), 4) + " |\n";
    }
  }

  if (const auto ca = section("cascade_correlations.json", "cascades")) {
    md += "\n## Cascades\n\n";
    md += "| pair | correlation |\n|---|---|\n";
    md += "| size vs citations | " + md_corr((*ca)["size_outdeg"]) + " |\n";
    md += "| size vs depth | " + md_corr((*ca)["size_depth"]) + " |\n";
    md += "| size vs leaves | " + md_corr((*ca)["size_leaves"]) + " |\n";
    md += "| depth vs leaves | " + md_corr((*ca)["depth_leaves"]) + " |\n";
  }

  if (const auto cf = section("community_flow.json", "communities")) {
    md += "\n## Community flow\n\n";
    md += "Communities: " + std::to_string((*cf)["labels"].size()) + ", edges counted: " +
          (*cf)["counted_edges"].dump() + ", unlabeled dropped: " +
          (*cf)["dropped_unlabeled"].dump() + ".\n";
    md += "Matrices: community_counts.csv, community_weights.csv.\n";
  }

  if (const auto im = section("impact_correlations.json", "impact")) {
    md += "\n## Impact study\n\n";
    if (im->contains("overall") && !(*im)["overall"].is_null()) {
      const json& ov = (*im)["overall"];
      md += "Overall (" + ov["rows"].dump() + " rows):\n\n";
      md += "| variable | correlation with citing impact |\n|---|---|\n";
      md += "| reference age (time_diff) | " + md_corr(ov["time_diff"]) + " |\n";
      md += "| community weight (c_weight) | " + md_corr(ov["c_weight"]) + " |\n";
    }
    if (im->contains("split") && (*im)["split"].contains("top")) {
      const json& sp = (*im)["split"];
      md += "\nImpact split at quantile " + format_fixed(sp["quantile"].get<double>(), 2) +
            " (threshold " + format_double(sp["threshold"].get<double>()) + "):\n\n";
      md += "| group | time_diff | c_weight |\n|---|---|---|\n";
      md += "| bottom | " + md_corr(sp["bottom"]["time_diff"]) + " | " +
            md_corr(sp["bottom"]["c_weight"]) + " |\n";
      md += "| top | " + md_corr(sp["top"]["time_diff"]) + " | " +
            md_corr(sp["top"]["c_weight"]) + " |\n";
    }
    if (im->contains("by_era") && !(*im)["by_era"].empty()) {
      md += "\nPer era, Pearson of community weight vs log impact:\n\n";
      md += "| era | r | rows |\n|---|---|---|\n";
      for (const json& e : (*im)["by_era"]) {
        md += "| " + e["era"][0].dump() + "-" + e["era"][1].dump() + " | " +
              md_corr(e["pearson_log_impact"]) + " | " + e["rows_used"].dump() + " |\n";
      }
    }
    if (im->contains("books")) {
      const json& bk = (*im)["books"];
      md += "\nCiting-side kind contrast (time span vs citing citations):\n\n";
      md += "| citing kind | correlation |\n|---|---|\n";
      md += "| books/chapters | " + md_corr(bk["books"]) + " |\n";
      md += "| papers | " + md_corr(bk["papers"]) + " |\n";
    }
  }

  if (combined.empty()) {
    throw DataError(o.dir + ": no analysis outputs found to report on");
  }

  const std::string json_path = out_path(o.dir, "report.json");
  const std::string md_path = out_path(o.dir, "report.md");
  write_json(json_path, combined);
  write_file(md_path, md);
  m.wall_seconds["assemble"] = sw.lap();
  m.outputs = {json_path, md_path};
  m.write(out_path(o.dir, "report.manifest.json"));
  std::fprintf(stderr, "report: %zu sections -> %s\n", combined.size(), md_path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Citation-network analysis toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  const std::vector<std::string> full_argv = collect_argv(argc, argv);
  const auto manifest_for = [&](const char* cmd) {
    RunManifest m;
    m.command = cmd;
    m.argv = full_argv;
    return m;
  };

  std::string format = "csv";

  SynthOpts so;
  auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic corpus");
  synth->add_option("--out", so.out, "Output directory")->required();
  synth->add_option("--nodes", so.nodes, "Number of papers");
  synth->add_option("--years", so.years, "Publication year range FIRST:LAST");
  synth->add_option("--n-communities", so.n_communities, "Number of communities");
  synth->add_option("--refs", so.refs, "Mean references per paper");
  synth->add_option("--pa", so.pa, "Preferential-attachment exponent");
  synth->add_option("--homophily", so.homophily, "Probability a reference stays in-community");
  synth->add_option("--half-life", so.half_life, "Recency half-life in years (<= 0 disables)");
  synth->add_option("--weight-effect", so.weight_effect,
                    "Impact coupling on within-community reference fraction");
  synth->add_option("--recency-effect", so.recency_effect,
                    "Impact coupling on mean reference age");
  synth->add_option("--seed", so.seed, "Random seed");
  synth->callback([&] { run_synth(so, manifest_for("synth")); });

  IngestOpts io_;
  auto* ingest = app.add_subcommand("ingest", "Validate and clean a raw corpus");
  ingest->add_option("--nodes", io_.nodes, "Nodes TSV")->required();
  ingest->add_option("--edges", io_.edges, "Edges TSV")->required();
  ingest->add_option("--communities", io_.communities, "Venue-to-community map file");
  ingest->add_option("--out", io_.out, "Output directory")->required();
  ingest->add_flag("--lenient", io_.lenient, "Drop and count bad references instead of failing");
  ingest->add_flag("--require-venue", io_.require_venue,
                   "Drop records whose venue matches no community rule");
  ingest->add_option("--valid-years", io_.valid_years, "Keep only years in FIRST:LAST");
  ingest->callback([&] { run_ingest(io_, manifest_for("ingest")); });

  GraphOpts go;
  auto* graph = app.add_subcommand("graph", "Build a citation graph snapshot");
  graph->add_option("--nodes", go.nodes, "Nodes TSV")->required();
  graph->add_option("--edges", go.edges, "Edges TSV")->required();
  graph->add_option("--communities", go.communities, "Venue-to-community map file");
  graph->add_option("--out", go.out, "Snapshot file (e.g. graph.cgrf)")->required();
  graph->add_option("--valid-years", go.valid_years, "Acceptable publication years FIRST:LAST");
  graph->add_flag("--lenient", go.lenient, "Drop and count offending records instead of failing");
  graph->callback([&] { run_graph(go, manifest_for("graph")); });

  StructureOpts sto;
  auto* structure = app.add_subcommand("structure", "Degrees, components, geodesics");
  structure->add_option("--graph", sto.graph, "Graph snapshot")->required();
  structure->add_option("--out", sto.out, "Output directory")->required();
  structure->add_option("--geodesic-sources", sto.geodesic_sources,
                        "BFS sources: -1 auto, 0 exact, k > 0 sampled");
  structure->add_option("--geodesic-seed", sto.geodesic_seed, "Source sampling seed");
  structure->add_option("--exact-cap", sto.exact_cap, "Node limit for exact geodesics");
  structure->add_option("--reach-years", sto.reach_years,
                        "Backward reach from seed papers published in FIRST:LAST");
  structure->add_option("--top-k", sto.top_k, "Top-cited subgraph contrast size (0 = skip)");
  structure->add_option("--rich-seed", sto.rich_seed, "Random-sample seed for the contrast");
  structure->add_option("--threads", sto.threads, "Worker threads (0 = hardware)");
  structure->callback([&] {
    sto.svg = format == "svg";
    run_structure(sto, manifest_for("structure"));
  });

  CascadeOpts co;
  auto* cascades = app.add_subcommand("cascades", "Information cascades from every root");
  cascades->add_option("--graph", co.graph, "Graph snapshot")->required();
  cascades->add_option("--out", co.out, "Output directory")->required();
  cascades->add_option("--threads", co.threads, "Worker threads (0 = hardware)");
  cascades->callback([&] {
    co.svg = format == "svg";
    run_cascades(co, manifest_for("cascades"));
  });

  CommunityOpts cmo;
  auto* communities = app.add_subcommand("communities", "Community flow count and weight matrices");
  communities->add_option("--graph", cmo.graph, "Graph snapshot")->required();
  communities->add_option("--out", cmo.out, "Output directory")->required();
  communities->callback([&] {
    cmo.svg = format == "svg";
    run_communities(cmo, manifest_for("communities"));
  });

  ImpactOpts imo;
  auto* impact = app.add_subcommand("impact", "Normalized impact and edge-level correlations");
  impact->add_option("--graph", imo.graph, "Graph snapshot")->required();
  impact->add_option("--out", imo.out, "Output directory")->required();
  impact->add_option("--exclude-kinds", imo.exclude_kinds,
                     "Citing kinds to exclude (comma list or 'none')");
  impact->add_option("--max-refs", imo.max_refs,
                     "Exclude citing papers with at least this many references (0 = off)");
  impact->add_option("--max-year", imo.max_year,
                     "Exclude citing papers published after this year (0 = off)");
  impact->add_flag("--no-filter", imo.no_filter, "Keep every edge (overrides the filter flags)");
  impact->add_option("--quantile", imo.quantile, "Impact split quantile");
  impact->add_option("--eras", imo.eras, "Era list FIRST:LAST[,FIRST:LAST...]");
  impact->callback([&] { run_impact(imo, manifest_for("impact")); });

  ReportOpts ro;
  auto* report = app.add_subcommand("report", "Assemble analysis outputs into a report");
  report->add_option("--dir", ro.dir, "Directory holding the analysis outputs");
  report->callback([&] { run_report(ro, manifest_for("report")); });

  for (auto* sub : {synth, ingest, graph, structure, cascades, communities, impact, report}) {
    sub->add_option("--format", format, "Extra export format (csv, json, svg)")
        ->check(CLI::IsMember({"csv", "json", "svg"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
