#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "citeflow/graph.hpp"
#include "citeflow/types.hpp"

namespace citeflow {

enum class Direction : std::uint8_t { In, Out };
enum class Binning : std::uint8_t { Exact, Log2 };

struct HistogramBin {
  std::uint64_t lower = 0;  // Exact: the degree itself; Log2: bin is [lower, 2*lower), 0 alone
  std::uint64_t count = 0;
  double fraction = 0.0;
};

struct DegreeHistogram {
  Direction direction = Direction::Out;
  Binning binning = Binning::Exact;
  std::vector<HistogramBin> bins;  // empty bins omitted; lower strictly increasing
  std::uint64_t total = 0;         // nodes passing the kind filter
};

// Histogram over arbitrary non-negative integer values (cascade sizes etc.).
std::vector<HistogramBin> bin_values(std::span<const std::uint64_t> values, Binning binning);

// Degree histogram over nodes whose kind is in kind_filter. Zero-degree nodes
// get an explicit bin.
DegreeHistogram degree_histogram(const CitationGraph& g, Direction direction,
                                 KindMask kind_filter = KindMask::all(),
                                 Binning binning = Binning::Exact);

struct ComponentReport {
  std::uint64_t scc_count = 0;
  std::uint64_t largest_scc_size = 0;
  std::uint64_t wcc_count = 0;
  double largest_wcc_fraction = 0.0;
};

// SCCs via iterative Tarjan, WCCs via union-find over the undirected view.
ComponentReport components(const CitationGraph& g);

// Fraction of nodes published before seed_years.first that are reachable from
// any node published within seed_years by walking reference lists backwards.
// Throws std::invalid_argument when no node falls in seed_years or none
// precedes it.
double backward_reach_fraction(const CitationGraph& g, YearRange seed_years);

struct GeodesicMethod {
  enum class Kind : std::uint8_t { Exact, SampledSources };
  Kind kind = Kind::Exact;
  std::uint64_t sources = 0;  // SampledSources only
  std::uint64_t seed = 0;

  static GeodesicMethod exact() { return {}; }
  static GeodesicMethod sampled(std::uint64_t k, std::uint64_t seed) {
    return {Kind::SampledSources, k, seed};
  }
};

struct GeodesicReport {
  std::optional<double> mean_directed_distance;  // absent when no pair is reachable
  std::uint64_t max_observed = 0;
  double reachable_pair_fraction = 0.0;  // ordered-pair convention
  std::uint64_t reachable_pairs = 0;
  GeodesicMethod method;
};

// BFS distances along forward edges. Exact runs from every node and refuses
// graphs larger than exact_cap; SampledSources(k, seed) draws k distinct
// sources uniformly and rescales the pair fraction to ordered-pair space.
// Sampling with k = n reproduces Exact bit for bit.
GeodesicReport geodesics(const CitationGraph& g, GeodesicMethod method,
                         std::uint64_t exact_cap = 20000, unsigned threads = 0);

struct RichClubReport {
  SubgraphResult top;             // induced by the k most-cited nodes
  ComponentReport top_components;
  std::uint64_t top_edges = 0;
  SubgraphResult random_sample;   // induced by k uniformly drawn nodes
  ComponentReport random_components;
  std::uint64_t random_edges = 0;
  std::uint64_t seed = 0;
};

// Top-k nodes by out-degree (ties to the lower node id) and, for the density
// contrast, the same induced-subgraph measurements on a seeded uniform sample
// of k nodes.
RichClubReport top_cited_subgraph(const CitationGraph& g, std::uint64_t k, std::uint64_t seed = 0);

}  // namespace citeflow
