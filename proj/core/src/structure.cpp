#include "citeflow/structure.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include "citeflow/parallel.hpp"

namespace citeflow {

std::vector<HistogramBin> bin_values(std::span<const std::uint64_t> values, Binning binning) {
  std::map<std::uint64_t, std::uint64_t> acc;
  for (std::uint64_t v : values) {
    const std::uint64_t lower = binning == Binning::Exact ? v : std::bit_floor(v);
    ++acc[lower];
  }
  std::vector<HistogramBin> bins;
  bins.reserve(acc.size());
  const double total = static_cast<double>(values.size());
  for (const auto& [lower, count] : acc) {
    bins.push_back({lower, count, static_cast<double>(count) / total});
  }
  return bins;
}

DegreeHistogram degree_histogram(const CitationGraph& g, Direction direction,
                                 KindMask kind_filter, Binning binning) {
  std::vector<std::uint64_t> degrees;
  degrees.reserve(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (!kind_filter.contains(g.kind(v))) continue;
    degrees.push_back(direction == Direction::Out ? g.out_degree(v) : g.in_degree(v));
  }
  DegreeHistogram h;
  h.direction = direction;
  h.binning = binning;
  h.total = degrees.size();
  h.bins = bin_values(degrees, binning);
  return h;
}

namespace {

struct UnionFind {
  std::vector<NodeId> parent;
  std::vector<std::uint32_t> size;

  explicit UnionFind(NodeId n) : parent(n), size(n, 1) {
    std::iota(parent.begin(), parent.end(), NodeId{0});
  }
  NodeId find(NodeId v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  }
  void unite(NodeId a, NodeId b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size[a] < size[b]) std::swap(a, b);
    parent[b] = a;
    size[a] += size[b];
  }
};

}  // namespace

ComponentReport components(const CitationGraph& g) {
  const NodeId n = g.node_count();
  ComponentReport rep;
  if (n == 0) return rep;

  // Iterative Tarjan; an explicit stack because DFS depth can reach n.
  constexpr std::uint32_t kUnvisited = 0xffffffffu;
  std::vector<std::uint32_t> index(n, kUnvisited), lowlink(n, 0);
  std::vector<std::uint8_t> on_stack(n, 0);
  std::vector<NodeId> stack;
  std::vector<std::pair<NodeId, std::uint64_t>> call;  // (node, next child slot)
  std::uint32_t next_index = 0;

  for (NodeId root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    index[root] = lowlink[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    call.emplace_back(root, 0);
    while (!call.empty()) {
      const NodeId v = call.back().first;
      const std::uint64_t ci = call.back().second;
      const auto nbrs = g.citers(v);
      if (ci < nbrs.size()) {
        ++call.back().second;
        const NodeId w = nbrs[ci];
        if (index[w] == kUnvisited) {
          index[w] = lowlink[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          lowlink[v] = std::min(lowlink[v], index[w]);
        }
        continue;
      }
      call.pop_back();
      if (!call.empty()) {
        const NodeId parent = call.back().first;
        lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
      }
      if (lowlink[v] == index[v]) {
        std::uint64_t size = 0;
        while (true) {
          const NodeId w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          ++size;
          if (w == v) break;
        }
        ++rep.scc_count;
        rep.largest_scc_size = std::max(rep.largest_scc_size, size);
      }
    }
  }

  UnionFind uf(n);
  g.for_each_edge([&](const CitationEdge& e) { uf.unite(e.cited, e.citing); });
  std::uint64_t largest = 0;
  for (NodeId v = 0; v < n; ++v) {
    if (uf.find(v) == v) {
      ++rep.wcc_count;
      largest = std::max<std::uint64_t>(largest, uf.size[v]);
    }
  }
  rep.largest_wcc_fraction = static_cast<double>(largest) / static_cast<double>(n);
  return rep;
}

double backward_reach_fraction(const CitationGraph& g, YearRange seed_years) {
  const NodeId n = g.node_count();
  std::vector<NodeId> queue;
  std::vector<std::uint8_t> visited(n, 0);
  std::uint64_t earlier_total = 0;
  for (NodeId v = 0; v < n; ++v) {
    if (g.year(v) < seed_years.first) ++earlier_total;
    if (seed_years.contains(g.year(v))) {
      visited[v] = 1;
      queue.push_back(v);
    }
  }
  if (queue.empty()) throw std::invalid_argument("backward_reach_fraction: empty seed set");
  if (earlier_total == 0) {
    throw std::invalid_argument("backward_reach_fraction: no nodes precede the seed range");
  }

  std::uint64_t reached_earlier = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId v = queue[head];
    for (NodeId ref : g.references(v)) {
      if (visited[ref]) continue;
      visited[ref] = 1;
      if (g.year(ref) < seed_years.first) ++reached_earlier;
      queue.push_back(ref);
    }
  }
  return static_cast<double>(reached_earlier) / static_cast<double>(earlier_total);
}

namespace {

// Sorted k-subset of [0, n) drawn uniformly (partial Fisher-Yates).
std::vector<NodeId> sample_nodes(NodeId n, std::uint64_t k, std::uint64_t seed) {
  std::vector<NodeId> pool(n);
  std::iota(pool.begin(), pool.end(), NodeId{0});
  std::mt19937_64 rng(seed);
  k = std::min<std::uint64_t>(k, n);
  for (std::uint64_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::uint64_t> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

GeodesicReport geodesics(const CitationGraph& g, GeodesicMethod method, std::uint64_t exact_cap,
                         unsigned threads) {
  const NodeId n = g.node_count();
  GeodesicReport rep;
  rep.method = method;

  std::vector<NodeId> sources;
  if (method.kind == GeodesicMethod::Kind::Exact) {
    if (n > exact_cap) {
      throw std::invalid_argument("geodesics: node count exceeds the exact cap; use sampling");
    }
    sources.resize(n);
    std::iota(sources.begin(), sources.end(), NodeId{0});
  } else {
    sources = sample_nodes(n, method.sources, method.seed);
    rep.method.sources = sources.size();
  }
  if (n == 0 || sources.empty()) return rep;

  // Per-worker partials, summed after the joins: integer sums keep the merge
  // order-independent.
  const unsigned workers = effective_threads(threads);
  std::vector<std::uint64_t> sum_dist(workers, 0), pair_count(workers, 0), max_dist(workers, 0);
  std::atomic<std::uint64_t> next{0};
  constexpr std::uint64_t kBlock = 16;

  parallel_invoke(workers, [&](unsigned w) {
    std::vector<std::uint32_t> epoch_of(n, 0);
    std::vector<std::uint32_t> dist(n, 0);
    std::vector<NodeId> queue(n);
    std::uint32_t epoch = 0;

    while (true) {
      const std::uint64_t begin = next.fetch_add(kBlock, std::memory_order_relaxed);
      if (begin >= sources.size()) break;
      const std::uint64_t end = std::min<std::uint64_t>(begin + kBlock, sources.size());
      for (std::uint64_t si = begin; si < end; ++si) {
        const NodeId s = sources[si];
        ++epoch;
        epoch_of[s] = epoch;
        dist[s] = 0;
        queue[0] = s;
        std::size_t head = 0, tail = 1;
        while (head < tail) {
          const NodeId v = queue[head++];
          const std::uint32_t dv = dist[v];
          for (NodeId wnode : g.citers(v)) {
            if (epoch_of[wnode] == epoch) continue;
            epoch_of[wnode] = epoch;
            dist[wnode] = dv + 1;
            queue[tail++] = wnode;
            sum_dist[w] += dv + 1;
            ++pair_count[w];
            max_dist[w] = std::max<std::uint64_t>(max_dist[w], dv + 1);
          }
        }
      }
    }
  });

  std::uint64_t total_dist = 0, pairs = 0, max_seen = 0;
  for (unsigned w = 0; w < workers; ++w) {
    total_dist += sum_dist[w];
    pairs += pair_count[w];
    max_seen = std::max(max_seen, max_dist[w]);
  }
  rep.reachable_pairs = pairs;
  rep.max_observed = max_seen;
  if (pairs > 0) {
    rep.mean_directed_distance = static_cast<double>(total_dist) / static_cast<double>(pairs);
  }
  const double denom = static_cast<double>(sources.size()) * (static_cast<double>(n) - 1.0);
  rep.reachable_pair_fraction = denom > 0 ? static_cast<double>(pairs) / denom : 0.0;
  return rep;
}

RichClubReport top_cited_subgraph(const CitationGraph& g, std::uint64_t k, std::uint64_t seed) {
  const NodeId n = g.node_count();
  k = std::min<std::uint64_t>(k, n);

  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    const std::uint64_t da = g.out_degree(a), db = g.out_degree(b);
    if (da != db) return da > db;
    return a < b;
  });
  order.resize(k);

  RichClubReport rep;
  rep.seed = seed;
  rep.top = induced_subgraph(g, order);
  rep.top_components = components(rep.top.graph);
  rep.top_edges = rep.top.graph.edge_count();

  const std::vector<NodeId> random_nodes = sample_nodes(n, k, seed);
  rep.random_sample = induced_subgraph(g, random_nodes);
  rep.random_components = components(rep.random_sample.graph);
  rep.random_edges = rep.random_sample.graph.edge_count();
  return rep;
}

}  // namespace citeflow
