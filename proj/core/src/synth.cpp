#include "citeflow/synth.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace citeflow {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Fenwick tree over item weights; sample() finds the first item whose
// cumulative weight exceeds the target, skipping zero-weight items by
// construction.
struct Fenwick {
  std::vector<double> tree;  // 1-based
  double total_weight = 0.0;

  explicit Fenwick(std::size_t n) : tree(n + 1, 0.0) {}

  void add(std::size_t item, double delta) {
    total_weight += delta;
    for (std::size_t k = item + 1; k < tree.size(); k += k & (~k + 1)) tree[k] += delta;
  }

  std::size_t sample(double target) const {
    const std::size_t n = tree.size() - 1;
    std::size_t idx = 0;
    for (std::size_t mask = std::bit_floor(n); mask != 0; mask >>= 1) {
      const std::size_t nxt = idx + mask;
      if (nxt <= n && tree[nxt] <= target) {
        target -= tree[nxt];
        idx = nxt;
      }
    }
    // Rounding can push u * total to the full total; land on the last item
    // with weight instead of one past it.
    return std::min(idx, n - 1);
  }
};

// Random stream purposes.
constexpr std::uint64_t kYearStream = 1;
constexpr std::uint64_t kCommunityStream = 2;
constexpr std::uint64_t kRefCountStream = 3;
constexpr std::uint64_t kRefDrawStream = 4;

constexpr std::uint64_t kMaxRefs = 2047;  // keeps draw counters disjoint
constexpr int kDuplicateRetries = 8;

std::uint64_t draw_counter(std::uint64_t paper, std::uint64_t ref, std::uint64_t attempt,
                           std::uint64_t which) {
  return ((paper * (kMaxRefs + 1) + ref) * kDuplicateRetries + attempt) * 2 + which;
}

std::uint64_t geometric(double mean, double u) {
  if (mean <= 0.0) return 0;
  const double q = mean / (1.0 + mean);  // failure probability, P(K=k) = (1-q) q^k
  const double k = std::floor(std::log1p(-u) / std::log(q));
  return k < 0 ? 0 : static_cast<std::uint64_t>(std::min(k, 1.0e12));
}

std::string zero_pad(std::uint64_t value, int width, char prefix) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*llu", prefix, std::clamp(width, 1, 20),
                static_cast<unsigned long long>(value));
  return std::string(buf);
}

void validate(const GenConfig& cfg) {
  if (cfg.n_nodes < 1 || cfg.n_communities < 1 || cfg.n_nodes < cfg.n_communities) {
    throw std::invalid_argument("generate: need n_nodes >= n_communities >= 1");
  }
  if (cfg.n_nodes > 1000000000ull) throw std::invalid_argument("generate: n_nodes too large");
  if (cfg.n_communities > 30000) throw std::invalid_argument("generate: too many communities");
  if (!cfg.years.valid()) throw std::invalid_argument("generate: invalid year range");
  if (!(cfg.homophily >= 0.0 && cfg.homophily <= 1.0)) {
    throw std::invalid_argument("generate: homophily must lie in [0, 1]");
  }
  if (!(cfg.pa_strength >= 0.0)) throw std::invalid_argument("generate: pa_strength must be >= 0");
  if (!(cfg.refs_per_paper >= 0.0)) {
    throw std::invalid_argument("generate: refs_per_paper must be >= 0");
  }
}

}  // namespace

std::uint64_t keyed_u64(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ counter);
}

double unit_double(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

SynthCorpus generate(const GenConfig& cfg, GenReport* report) {
  validate(cfg);
  const std::uint64_t n = cfg.n_nodes;
  const std::uint32_t n_comm = cfg.n_communities;
  const std::int32_t width = cfg.years.width();
  const double lambda = (cfg.recency_half_life > 0.0 && std::isfinite(cfg.recency_half_life))
                            ? std::numbers::ln2 / cfg.recency_half_life
                            : 0.0;
  GenReport local;

  std::vector<std::int32_t> year_of(n);
  std::vector<std::uint32_t> comm_of(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    year_of[i] = cfg.years.first +
                 static_cast<std::int32_t>(keyed_u64(cfg.seed, kYearStream, i) %
                                           static_cast<std::uint64_t>(width));
    comm_of[i] = static_cast<std::uint32_t>(keyed_u64(cfg.seed, kCommunityStream, i) % n_comm);
  }

  // Chronological processing guarantees every edge points strictly backward
  // in time, so the output is a DAG by construction.
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return year_of[a] < year_of[b]; });

  std::vector<std::uint32_t> chrono_pos(n);
  for (std::uint64_t p = 0; p < n; ++p) chrono_pos[order[p]] = static_cast<std::uint32_t>(p);

  // Per-community position compression for the homophily trees.
  std::vector<std::vector<std::uint32_t>> comm_members(n_comm);
  std::vector<std::uint32_t> comm_pos(n);
  for (std::uint64_t p = 0; p < n; ++p) {
    const std::uint32_t paper = order[p];
    const std::uint32_t c = comm_of[paper];
    comm_pos[paper] = static_cast<std::uint32_t>(comm_members[c].size());
    comm_members[c].push_back(paper);
  }

  Fenwick global(n);
  std::vector<Fenwick> comm_tree;
  comm_tree.reserve(n_comm);
  for (std::uint32_t c = 0; c < n_comm; ++c) comm_tree.emplace_back(comm_members[c].size());

  // Attractiveness of paper t with d citations so far:
  //   quality[t] * (d + 1)^pa_strength * exp((year[t] - last_year) * lambda).
  // The recency kernel exp(-(citing_year - year[t]) * lambda) differs from
  // this only by a factor constant across candidates of one draw, so the
  // static form samples identically; anchoring at the last year keeps the
  // exponentials bounded by 1.
  std::vector<double> base(n), quality(n, 1.0), current_weight(n, 0.0);
  std::vector<std::uint64_t> degree(n, 0);
  for (std::uint64_t i = 0; i < n; ++i) {
    base[i] = std::exp(static_cast<double>(year_of[i] - cfg.years.last) * lambda);
  }

  const auto bump_degree = [&](std::uint32_t t) {
    ++degree[t];
    const double neww =
        quality[t] * std::pow(static_cast<double>(degree[t] + 1), cfg.pa_strength) * base[t];
    const double delta = neww - current_weight[t];
    current_weight[t] = neww;
    global.add(chrono_pos[t], delta);
    comm_tree[comm_of[t]].add(comm_pos[t], delta);
  };

  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // (cited, citing) paper indices
  edges.reserve(static_cast<std::size_t>(
      std::min<double>(static_cast<double>(n) * (cfg.refs_per_paper + 1.0), 5e8)));

  std::vector<std::uint32_t> chosen;
  std::uint64_t group_begin = 0;
  while (group_begin < n) {
    std::uint64_t group_end = group_begin;
    const std::int32_t group_year = year_of[order[group_begin]];
    while (group_end < n && year_of[order[group_end]] == group_year) ++group_end;

    for (std::uint64_t p = group_begin; p < group_end; ++p) {
      const std::uint32_t paper = order[p];
      const std::uint32_t c = comm_of[paper];
      const std::uint64_t want = std::min(
          geometric(cfg.refs_per_paper, unit_double(keyed_u64(cfg.seed, kRefCountStream, paper))),
          kMaxRefs);

      chosen.clear();
      for (std::uint64_t j = 0; j < want; ++j) {
        bool placed = false;
        bool sampled_any = false;
        for (int attempt = 0; attempt < kDuplicateRetries && !placed; ++attempt) {
          const double u_pool = unit_double(
              keyed_u64(cfg.seed, kRefDrawStream, draw_counter(paper, j, attempt, 0)));
          const double u_pos = unit_double(
              keyed_u64(cfg.seed, kRefDrawStream, draw_counter(paper, j, attempt, 1)));
          const bool own_pool = u_pool < cfg.homophily;
          const Fenwick& tree = own_pool ? comm_tree[c] : global;
          if (!(tree.total_weight > 0.0)) continue;  // pool has no earlier papers yet
          sampled_any = true;
          const std::size_t slot = tree.sample(u_pos * tree.total_weight);
          const std::uint32_t target =
              own_pool ? comm_members[c][slot] : order[slot];
          if (std::find(chosen.begin(), chosen.end(), target) != chosen.end()) continue;
          chosen.push_back(target);
          placed = true;
        }
        if (!placed) {
          if (sampled_any) ++local.duplicate_skips;
          else ++local.clipped_refs;
        }
      }

      // Plant the impact couplings: how local and how recent this paper's
      // reference list is feeds its own future attractiveness.
      if (!chosen.empty()) {
        double within = 0, span_sum = 0;
        for (std::uint32_t t : chosen) {
          if (comm_of[t] == c) within += 1;
          span_sum += static_cast<double>(year_of[paper] - year_of[t]);
        }
        const double k_eff = static_cast<double>(chosen.size());
        const double boost = cfg.impact_couplings.weight_effect * (within / k_eff) +
                             cfg.impact_couplings.recency_effect * (span_sum / k_eff);
        quality[paper] = std::exp(std::clamp(boost, -4.0, 4.0));
      }

      for (std::uint32_t t : chosen) {
        edges.emplace_back(t, paper);
        bump_degree(t);
      }
    }

    // Insert the finished year group; same-year papers never cite each other.
    for (std::uint64_t p = group_begin; p < group_end; ++p) {
      const std::uint32_t paper = order[p];
      const double w = quality[paper] * base[paper];  // degree 0: (0 + 1)^pa = 1
      current_weight[paper] = w;
      global.add(p, w);
      comm_tree[comm_of[paper]].add(comm_pos[paper], w);
    }
    group_begin = group_end;
  }

  local.edges = edges.size();

  const int id_width = std::max(7, static_cast<int>(std::to_string(n - 1).size()));
  const int comm_width = std::max(3, static_cast<int>(std::to_string(n_comm - 1).size()));

  SynthCorpus corpus;
  corpus.map.labels.reserve(n_comm);
  for (std::uint32_t c = 0; c < n_comm; ++c) {
    corpus.map.labels.push_back(zero_pad(c, comm_width, 'C'));
    corpus.map.rules.emplace_back(corpus.map.labels.back(), corpus.map.labels.back());
  }

  corpus.records.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    RawRecord& r = corpus.records[i];
    r.external_id = zero_pad(i, id_width, 'p');
    r.year = year_of[i];
    r.venue = corpus.map.labels[comm_of[i]];
    r.kind = DocKind::Paper;
  }

  corpus.edges.reserve(edges.size());
  for (const auto& [cited, citing] : edges) {
    corpus.edges.emplace_back(corpus.records[cited].external_id,
                              corpus.records[citing].external_id);
  }

  if (report) *report = local;
  return corpus;
}

}  // namespace citeflow
