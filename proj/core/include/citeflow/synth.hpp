#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "citeflow/corpus.hpp"
#include "citeflow/types.hpp"

namespace citeflow {

// Counter-based random stream: value i of stream s under a seed is
// splitmix64(splitmix64(splitmix64(seed) ^ s) ^ i). Evaluation order never
// affects the draw, so generation is reproducible under any scheduling.
std::uint64_t keyed_u64(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

// Uniform double in [0, 1) from a 64-bit draw (top 53 bits).
double unit_double(std::uint64_t bits);

struct ImpactCouplings {
  // Log-linear multipliers on a paper's attractiveness: exp(weight_effect *
  // within-community reference fraction + recency_effect * mean reference
  // time span), clamped to exp(+-4). Zero-reference papers get factor 1.
  double weight_effect = 0.0;
  double recency_effect = 0.0;
};

struct GenConfig {
  std::uint64_t n_nodes = 10000;
  YearRange years{1980, 2004};
  std::uint32_t n_communities = 8;
  double refs_per_paper = 3.0;  // mean of the geometric reference-count draw
  double pa_strength = 1.0;     // exponent on (citations received + 1)
  double homophily = 0.6;       // probability a reference stays in the community
  double recency_half_life = 8.0;  // years; <= 0 or infinite disables decay
  ImpactCouplings impact_couplings;
  std::uint64_t seed = 42;
};

struct GenReport {
  std::uint64_t clipped_refs = 0;     // draws with no earlier candidate
  std::uint64_t duplicate_skips = 0;  // draws abandoned after repeated duplicate hits
  std::uint64_t edges = 0;
};

struct SynthCorpus {
  std::vector<RawRecord> records;
  std::vector<std::pair<std::string, std::string>> edges;  // (cited_id, citing_id)
  CommunityMap map;
};

// Seeded synthetic citation corpus. Years and communities are uniform;
// references target strictly earlier papers with probability proportional to
// (citations received + 1)^pa_strength decayed by a half-life recency kernel,
// drawn from the paper's own community with probability `homophily`.
// Attractiveness multipliers planted via impact_couplings tie a paper's
// future citations to how local and how recent its own references were.
// Output is deterministic given the config; same-config calls are
// byte-identical after serialization. Throws std::invalid_argument on an
// invalid config.
SynthCorpus generate(const GenConfig& config, GenReport* report = nullptr);

}  // namespace citeflow
