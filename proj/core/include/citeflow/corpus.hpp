#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "citeflow/types.hpp"

namespace citeflow {

// Pre-cleaning publication record as parsed from a nodes file.
struct RawRecord {
  std::string external_id;
  std::string title;
  std::vector<std::string> authors;
  std::optional<std::int32_t> year;
  std::optional<std::string> venue;
  DocKind kind = DocKind::Other;
};

// Ordered venue-pattern rules resolving venues to community labels.
// Matching is case-insensitive substring; the first matching rule wins.
struct CommunityMap {
  std::vector<std::string> labels;
  std::vector<std::pair<std::string, std::string>> rules;  // (pattern, community)

  std::optional<std::string_view> match(std::string_view venue) const;
};

struct CleanPolicy {
  bool require_year = true;
  bool require_venue = false;
  std::optional<YearRange> year_range;  // records with a year outside are dropped
};

struct CleanReport {
  std::uint64_t dropped_missing_year = 0;
  std::uint64_t dropped_unmatched_venue = 0;
  std::uint64_t dropped_out_of_range = 0;

  std::uint64_t total() const {
    return dropped_missing_year + dropped_unmatched_venue + dropped_out_of_range;
  }
};

struct LoadReport {
  std::uint64_t dangling_edges_dropped = 0;
};

struct CorpusData {
  std::vector<RawRecord> records;
  std::vector<std::pair<std::string, std::string>> edges;  // (cited_id, citing_id)
};

// Parses the nodes and edges files (formats documented in README). Malformed
// lines and duplicate ids raise DataError with the offending line number. In
// strict mode an edge endpoint not declared in the nodes file is an error; in
// lenient mode such edges are dropped and counted.
CorpusData load_corpus(const std::string& nodes_path, const std::string& edges_path,
                       bool lenient = false, LoadReport* report = nullptr);

// Parses a community map file: header `communities: <comma-separated labels>`
// followed by ordered `pattern<TAB>community` lines.
CommunityMap load_community_map(const std::string& path);

// Applies the cleaning policy. When policy.require_venue is set a map must be
// given: records whose venue is absent or matches no rule are dropped.
// Cleaning is total and idempotent.
std::vector<RawRecord> clean(std::vector<RawRecord> records, const CleanPolicy& policy,
                             const CommunityMap* map = nullptr, CleanReport* report = nullptr);

// First-match community per record; records with no venue or no matching rule
// get nullopt. Output is parallel to the input.
std::vector<std::optional<std::string>> assign_communities(std::span<const RawRecord> records,
                                                           const CommunityMap& map);

struct RecordLink {
  std::string id_a;
  std::string id_b;
  double similarity;
};

// Greedy one-to-one matching of records across two corpora by cosine
// similarity of title+author token sets (lowercased, punctuation stripped,
// unit weight per distinct token). Pairs with similarity >= threshold are
// matched best-first; records with disjoint token sets never match. The
// result is symmetric under swapping a and b.
std::vector<RecordLink> link_records(std::span<const RawRecord> a, std::span<const RawRecord> b,
                                     double threshold = 0.9);

// Serializers emitting the exact file formats load_corpus / load_community_map
// read back.
void write_nodes_file(const std::string& path, std::span<const RawRecord> records);
void write_edges_file(const std::string& path,
                      std::span<const std::pair<std::string, std::string>> edges);
void write_community_map(const std::string& path, const CommunityMap& map);

}  // namespace citeflow
