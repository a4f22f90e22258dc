#include "citeflow/types.hpp"

#include "citeflow/io.hpp"

namespace citeflow {

std::string_view to_string(DocKind kind) {
  switch (kind) {
    case DocKind::Paper: return "paper";
    case DocKind::Book: return "book";
    case DocKind::BookChapter: return "chapter";
    case DocKind::Other: return "other";
  }
  return "other";
}

bool parse_doc_kind(std::string_view text, DocKind& out) {
  const std::string lower = to_lower(trim(text));
  if (lower == "paper") {
    out = DocKind::Paper;
  } else if (lower == "book") {
    out = DocKind::Book;
  } else if (lower == "chapter") {
    out = DocKind::BookChapter;
  } else if (lower == "other") {
    out = DocKind::Other;
  } else {
    return false;
  }
  return true;
}

}  // namespace citeflow
