#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>

namespace citeflow {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Problems rooted in the input data (parse failures, unresolved ids,
// inconsistent corpora). The CLI maps these to its data-error exit code.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Dense node index inside a CitationGraph.
using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = 0xffffffffu;

enum class DocKind : std::uint8_t { Paper = 0, Book = 1, BookChapter = 2, Other = 3 };

std::string_view to_string(DocKind kind);
bool parse_doc_kind(std::string_view text, DocKind& out);

// Inclusive year interval.
struct YearRange {
  std::int32_t first = 0;
  std::int32_t last = 0;

  bool contains(std::int32_t year) const { return year >= first && year <= last; }
  bool valid() const { return first <= last; }
  std::int32_t width() const { return last - first + 1; }
  bool operator==(const YearRange&) const = default;
};

// Small include/exclude set over DocKind.
struct KindMask {
  std::uint8_t bits = 0;

  static KindMask all() { return KindMask{0x0f}; }
  static KindMask none() { return KindMask{0}; }
  static KindMask of(std::initializer_list<DocKind> kinds) {
    KindMask m;
    for (DocKind k : kinds) m.add(k);
    return m;
  }

  KindMask& add(DocKind k) {
    bits = static_cast<std::uint8_t>(bits | (1u << static_cast<unsigned>(k)));
    return *this;
  }
  bool contains(DocKind k) const { return (bits >> static_cast<unsigned>(k)) & 1u; }
  bool empty() const { return bits == 0; }
  bool operator==(const KindMask&) const = default;
};

}  // namespace citeflow
