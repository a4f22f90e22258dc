#include "citeflow/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "citeflow/io.hpp"

namespace citeflow {

namespace {

constexpr std::string_view kNodesHeader = "id\tyear\tvenue\tkind\ttitle\tauthors";

// Iterates lines of a buffer without copying; strips \r and a leading BOM.
struct LineReader {
  std::string_view buffer;
  std::size_t pos = 0;
  std::size_t line_no = 0;

  explicit LineReader(std::string_view b) : buffer(b) {
    if (buffer.substr(0, 3) == "\xef\xbb\xbf") pos = 3;
  }

  bool next(std::string_view& line) {
    if (pos >= buffer.size()) return false;
    const std::size_t nl = buffer.find('\n', pos);
    line = nl == std::string_view::npos ? buffer.substr(pos)
                                        : buffer.substr(pos, nl - pos);
    pos = nl == std::string_view::npos ? buffer.size() : nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    return true;
  }
};

[[noreturn]] void fail_at(const std::string& file, std::size_t line_no, const std::string& what) {
  throw DataError(file + " line " + std::to_string(line_no) + ": " + what);
}

std::vector<std::string> parse_authors(std::string_view field) {
  std::vector<std::string> authors;
  if (trim(field).empty()) return authors;
  for (std::string_view part : split(field, ';')) {
    const std::string_view t = trim(part);
    if (!t.empty()) authors.emplace_back(t);
  }
  return authors;
}

std::vector<std::string> tokenize(const RawRecord& r) {
  std::string text;
  text.reserve(r.title.size() + 16);
  text += r.title;
  for (const std::string& a : r.authors) {
    text += ' ';
    text += a;
  }
  for (char& c : text) {
    const unsigned char u = static_cast<unsigned char>(c);
    c = std::isalnum(u) ? static_cast<char>(std::tolower(u)) : ' ';
  }
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ') ++j;
    if (j > i) tokens.emplace_back(text.substr(i, j - i));
    i = j;
  }
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  return tokens;
}

}  // namespace

std::optional<std::string_view> CommunityMap::match(std::string_view venue) const {
  for (const auto& [pattern, community] : rules) {
    if (contains_ci(venue, pattern)) return std::string_view(community);
  }
  return std::nullopt;
}

CorpusData load_corpus(const std::string& nodes_path, const std::string& edges_path, bool lenient,
                       LoadReport* report) {
  CorpusData data;
  LoadReport local;

  const std::string nodes_buf = read_file(nodes_path);
  LineReader nodes(nodes_buf);
  std::string_view line;
  if (!nodes.next(line) || trim(line) != kNodesHeader) {
    fail_at(nodes_path, nodes.line_no == 0 ? 1 : nodes.line_no,
            "expected header 'id<TAB>year<TAB>venue<TAB>kind<TAB>title<TAB>authors'");
  }
  std::unordered_map<std::string, std::size_t> seen_ids;
  while (nodes.next(line)) {
    if (trim(line).empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 6) {
      fail_at(nodes_path, nodes.line_no,
              "expected 6 tab-separated fields, got " + std::to_string(fields.size()));
    }
    RawRecord r;
    r.external_id = std::string(trim(fields[0]));
    if (r.external_id.empty()) fail_at(nodes_path, nodes.line_no, "empty id");

    const std::string_view year_field = trim(fields[1]);
    if (!year_field.empty()) {
      std::int32_t y = 0;
      if (!parse_i32(year_field, y)) {
        fail_at(nodes_path, nodes.line_no, "bad year '" + std::string(year_field) + "'");
      }
      r.year = y;
    }
    const std::string_view venue_field = trim(fields[2]);
    if (!venue_field.empty()) r.venue = std::string(venue_field);

    const std::string_view kind_field = trim(fields[3]);
    if (kind_field.empty()) {
      r.kind = DocKind::Other;
    } else if (!parse_doc_kind(kind_field, r.kind)) {
      fail_at(nodes_path, nodes.line_no, "bad kind '" + std::string(kind_field) + "'");
    }
    r.title = std::string(trim(fields[4]));
    r.authors = parse_authors(fields[5]);

    auto [it, inserted] = seen_ids.emplace(r.external_id, nodes.line_no);
    if (!inserted) {
      fail_at(nodes_path, nodes.line_no,
              "duplicate id '" + r.external_id + "' (first declared on line " +
                  std::to_string(it->second) + ")");
    }
    data.records.push_back(std::move(r));
  }

  const std::string edges_buf = read_file(edges_path);
  LineReader edges(edges_buf);
  std::vector<std::string> dangling;
  while (edges.next(line)) {
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split(t, '\t');
    if (fields.size() != 2) {
      fail_at(edges_path, edges.line_no,
              "expected 'cited_id<TAB>citing_id', got " + std::to_string(fields.size()) +
                  " fields");
    }
    std::string cited(trim(fields[0]));
    std::string citing(trim(fields[1]));
    if (cited.empty() || citing.empty()) fail_at(edges_path, edges.line_no, "empty endpoint id");

    const bool cited_known = seen_ids.count(cited) != 0;
    const bool citing_known = seen_ids.count(citing) != 0;
    if (!cited_known || !citing_known) {
      if (lenient) {
        ++local.dangling_edges_dropped;
        continue;
      }
      if (!cited_known) dangling.push_back(cited);
      if (!citing_known) dangling.push_back(citing);
      if (dangling.size() >= 20) break;  // enough to report
      continue;
    }
    data.edges.emplace_back(std::move(cited), std::move(citing));
  }
  if (!dangling.empty()) {
    std::sort(dangling.begin(), dangling.end());
    dangling.erase(std::unique(dangling.begin(), dangling.end()), dangling.end());
    std::string ids;
    for (const std::string& id : dangling) {
      if (!ids.empty()) ids += ", ";
      ids += id;
    }
    throw DataError(edges_path + ": edge endpoints not declared in nodes file: " + ids);
  }

  if (report) *report = local;
  return data;
}

CommunityMap load_community_map(const std::string& path) {
  CommunityMap map;
  const std::string buf = read_file(path);
  LineReader reader(buf);
  std::string_view line;

  bool have_header = false;
  while (reader.next(line)) {
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!have_header) {
      constexpr std::string_view kPrefix = "communities:";
      if (t.substr(0, kPrefix.size()) != kPrefix) {
        fail_at(path, reader.line_no, "expected 'communities: <comma-separated labels>' header");
      }
      for (std::string_view part : split(t.substr(kPrefix.size()), ',')) {
        const std::string_view label = trim(part);
        if (!label.empty()) map.labels.emplace_back(label);
      }
      if (map.labels.empty()) fail_at(path, reader.line_no, "no community labels declared");
      have_header = true;
      continue;
    }
    const auto fields = split(t, '\t');
    if (fields.size() != 2) {
      fail_at(path, reader.line_no, "expected 'pattern<TAB>community'");
    }
    std::string pattern(trim(fields[0]));
    std::string community(trim(fields[1]));
    if (pattern.empty() || community.empty()) fail_at(path, reader.line_no, "empty rule field");
    if (std::find(map.labels.begin(), map.labels.end(), community) == map.labels.end()) {
      fail_at(path, reader.line_no, "community '" + community + "' not declared in header");
    }
    map.rules.emplace_back(std::move(pattern), std::move(community));
  }
  if (!have_header) throw DataError(path + ": missing 'communities:' header");
  if (map.rules.empty()) throw DataError(path + ": community map declares no rules");
  return map;
}

std::vector<RawRecord> clean(std::vector<RawRecord> records, const CleanPolicy& policy,
                             const CommunityMap* map, CleanReport* report) {
  if (policy.require_venue && map == nullptr) {
    throw std::invalid_argument("clean: require_venue set but no community map given");
  }
  CleanReport local;
  std::vector<RawRecord> kept;
  kept.reserve(records.size());
  for (RawRecord& r : records) {
    if (policy.require_year && !r.year) {
      ++local.dropped_missing_year;
      continue;
    }
    if (policy.year_range && r.year && !policy.year_range->contains(*r.year)) {
      ++local.dropped_out_of_range;
      continue;
    }
    if (policy.require_venue && (!r.venue || !map->match(*r.venue))) {
      ++local.dropped_unmatched_venue;
      continue;
    }
    kept.push_back(std::move(r));
  }
  if (report) *report = local;
  return kept;
}

std::vector<std::optional<std::string>> assign_communities(std::span<const RawRecord> records,
                                                           const CommunityMap& map) {
  std::vector<std::optional<std::string>> out;
  out.reserve(records.size());
  for (const RawRecord& r : records) {
    if (!r.venue) {
      out.emplace_back(std::nullopt);
      continue;
    }
    const auto hit = map.match(*r.venue);
    out.emplace_back(hit ? std::optional<std::string>(std::string(*hit)) : std::nullopt);
  }
  return out;
}

std::vector<RecordLink> link_records(std::span<const RawRecord> a, std::span<const RawRecord> b,
                                     double threshold) {
  std::vector<std::vector<std::string>> tokens_a(a.size()), tokens_b(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) tokens_a[i] = tokenize(a[i]);
  for (std::size_t j = 0; j < b.size(); ++j) tokens_b[j] = tokenize(b[j]);

  std::unordered_map<std::string_view, std::vector<std::uint32_t>> index;
  for (std::size_t j = 0; j < b.size(); ++j) {
    for (const std::string& tok : tokens_b[j]) {
      index[tok].push_back(static_cast<std::uint32_t>(j));
    }
  }

  struct Candidate {
    double similarity;
    std::uint32_t i, j;
  };
  std::vector<Candidate> candidates;
  std::unordered_map<std::uint32_t, std::uint32_t> shared;  // b index -> overlap count
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (tokens_a[i].empty()) continue;
    shared.clear();
    for (const std::string& tok : tokens_a[i]) {
      const auto it = index.find(std::string_view(tok));
      if (it == index.end()) continue;
      for (std::uint32_t j : it->second) ++shared[j];
    }
    for (const auto& [j, overlap] : shared) {
      const double sim = static_cast<double>(overlap) /
                         std::sqrt(static_cast<double>(tokens_a[i].size()) *
                                   static_cast<double>(tokens_b[j].size()));
      if (sim >= threshold && sim > 0.0) {
        candidates.push_back({sim, static_cast<std::uint32_t>(i), j});
      }
    }
  }

  // Order must not depend on which corpus is "a": ties sort by the unordered
  // id pair. Candidates with equal similarity and equal unordered ids touch
  // four distinct records, so their relative order cannot change the result.
  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& x, const Candidate& y) {
    if (x.similarity != y.similarity) return x.similarity > y.similarity;
    const std::string_view xa = a[x.i].external_id, xb = b[x.j].external_id;
    const std::string_view ya = a[y.i].external_id, yb = b[y.j].external_id;
    const auto x_key = std::minmax(xa, xb);
    const auto y_key = std::minmax(ya, yb);
    if (x_key != y_key) return x_key < y_key;
    return xa < ya;
  });

  std::vector<char> used_a(a.size(), 0), used_b(b.size(), 0);
  std::vector<RecordLink> links;
  for (const Candidate& c : candidates) {
    if (used_a[c.i] || used_b[c.j]) continue;
    used_a[c.i] = used_b[c.j] = 1;
    links.push_back({a[c.i].external_id, b[c.j].external_id, c.similarity});
  }
  return links;
}

namespace {

std::string sanitize_field(std::string_view value) {
  std::string out(value);
  for (char& c : out) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

}  // namespace

void write_nodes_file(const std::string& path, std::span<const RawRecord> records) {
  std::string out;
  out.reserve(records.size() * 48 + 64);
  out += kNodesHeader;
  out += '\n';
  for (const RawRecord& r : records) {
    out += sanitize_field(r.external_id);
    out += '\t';
    if (r.year) out += std::to_string(*r.year);
    out += '\t';
    if (r.venue) out += sanitize_field(*r.venue);
    out += '\t';
    out += to_string(r.kind);
    out += '\t';
    out += sanitize_field(r.title);
    out += '\t';
    for (std::size_t i = 0; i < r.authors.size(); ++i) {
      if (i) out += ';';
      out += sanitize_field(r.authors[i]);
    }
    out += '\n';
  }
  write_file(path, out);
}

void write_edges_file(const std::string& path,
                      std::span<const std::pair<std::string, std::string>> edges) {
  std::string out;
  out.reserve(edges.size() * 18 + 32);
  out += "# cited_id\tciting_id\n";
  for (const auto& [cited, citing] : edges) {
    out += sanitize_field(cited);
    out += '\t';
    out += sanitize_field(citing);
    out += '\n';
  }
  write_file(path, out);
}

void write_community_map(const std::string& path, const CommunityMap& map) {
  std::string out = "communities: ";
  for (std::size_t i = 0; i < map.labels.size(); ++i) {
    if (i) out += ", ";
    out += map.labels[i];
  }
  out += '\n';
  for (const auto& [pattern, community] : map.rules) {
    out += sanitize_field(pattern);
    out += '\t';
    out += sanitize_field(community);
    out += '\n';
  }
  write_file(path, out);
}

}  // namespace citeflow
