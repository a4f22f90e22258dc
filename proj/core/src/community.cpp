#include "citeflow/community.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "citeflow/io.hpp"

namespace citeflow {

namespace {

void derive_sums(CommunityMatrix& m) {
  const std::size_t c = m.size();
  m.row_sums.assign(c, 0);
  m.col_sums.assign(c, 0);
  m.total = 0;
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const std::uint64_t v = m.counts[i * c + j];
      m.row_sums[i] += v;
      m.col_sums[j] += v;
      m.total += v;
    }
  }
}

}  // namespace

CommunityMatrix matrix_from_counts(std::vector<std::string> labels,
                                   std::vector<std::uint64_t> counts) {
  const std::size_t c = labels.size();
  if (counts.size() != c * c) {
    throw std::invalid_argument("matrix_from_counts: counts must be C*C row-major");
  }
  CommunityMatrix m;
  m.labels = std::move(labels);
  m.counts = std::move(counts);
  derive_sums(m);
  return m;
}

CommunityMatrix count_matrix(const CitationGraph& g, CountReport* report) {
  const auto labels = g.community_labels();
  const std::size_t c = labels.size();
  CountReport local;

  CommunityMatrix m;
  m.labels.assign(labels.begin(), labels.end());
  m.counts.assign(c * c, 0);
  g.for_each_edge([&](const CitationEdge& e) {
    const std::int16_t ci = g.community_index(e.cited);
    const std::int16_t cj = g.community_index(e.citing);
    if (ci < 0 || cj < 0) {
      ++local.dropped_unlabeled;
      return;
    }
    ++m.counts[static_cast<std::size_t>(ci) * c + static_cast<std::size_t>(cj)];
    ++local.counted_edges;
  });
  if (local.counted_edges == 0) {
    throw DataError("count_matrix: no edge has both endpoints labeled");
  }
  derive_sums(m);
  if (report) *report = local;
  return m;
}

CommunityMatrix community_weights(CommunityMatrix m) {
  if (m.total == 0) throw std::invalid_argument("community_weights: empty count matrix");
  const std::size_t c = m.size();
  m.weights.assign(c * c, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < c; ++i) {
    if (m.row_sums[i] == 0) continue;
    for (std::size_t j = 0; j < c; ++j) {
      if (m.col_sums[j] == 0) continue;
      const double expected = m.expected(i, j);
      m.weights[i * c + j] =
          (static_cast<double>(m.counts[i * c + j]) - expected) / std::sqrt(expected);
    }
  }
  m.weights_filled = true;
  return m;
}

WeightLookupStatus try_edge_weight(const CommunityMatrix& m, std::int16_t cited_community,
                                   std::int16_t citing_community, double& out) {
  if (cited_community < 0 || citing_community < 0) return WeightLookupStatus::UnlabeledEndpoint;
  const std::size_t i = static_cast<std::size_t>(cited_community);
  const std::size_t j = static_cast<std::size_t>(citing_community);
  if (!m.weight_defined(i, j)) return WeightLookupStatus::AbsentCell;
  out = m.weight(i, j);
  return WeightLookupStatus::Ok;
}

double edge_weight_lookup(const CommunityMatrix& m, const CitationGraph& g, NodeId cited,
                          NodeId citing) {
  if (!m.weights_filled) throw std::invalid_argument("edge_weight_lookup: weights not filled");
  double w = 0;
  switch (try_edge_weight(m, g.community_index(cited), g.community_index(citing), w)) {
    case WeightLookupStatus::Ok:
      return w;
    case WeightLookupStatus::UnlabeledEndpoint:
      throw DataError("edge_weight_lookup: edge has an unlabeled endpoint");
    case WeightLookupStatus::AbsentCell:
      throw DataError("edge_weight_lookup: weight cell is absent (zero row or column sum)");
  }
  return w;  // unreachable
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += "\"\"";
    else out += ch;
  }
  out += '"';
  return out;
}

}  // namespace

void write_weights_csv(const CommunityMatrix& m, const std::string& path) {
  const std::size_t c = m.size();
  std::string out = "community";
  for (std::size_t j = 0; j < c; ++j) {
    out += ',';
    out += csv_escape(m.labels[j]);
  }
  out += '\n';
  for (std::size_t i = 0; i < c; ++i) {
    out += csv_escape(m.labels[i]);
    for (std::size_t j = 0; j < c; ++j) {
      out += ',';
      out += m.weight_defined(i, j) && m.weights_filled ? format_fixed(m.weight(i, j), 6) : "NA";
    }
    out += '\n';
  }
  write_file(path, out);
}

void write_counts_csv(const CommunityMatrix& m, const std::string& path) {
  const std::size_t c = m.size();
  std::string out = "community";
  for (std::size_t j = 0; j < c; ++j) {
    out += ',';
    out += csv_escape(m.labels[j]);
  }
  out += '\n';
  for (std::size_t i = 0; i < c; ++i) {
    out += csv_escape(m.labels[i]);
    for (std::size_t j = 0; j < c; ++j) {
      out += ',';
      out += std::to_string(m.count(i, j));
    }
    out += '\n';
  }
  write_file(path, out);
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

// Diverging shade: deep blue at -1, white at 0, deep red at +1.
std::string shade(double t) {
  t = std::clamp(t, -1.0, 1.0);
  int r, gcol, b;
  if (t >= 0) {
    r = 178 + static_cast<int>((255 - 178) * (1 - t));
    gcol = 24 + static_cast<int>((255 - 24) * (1 - t));
    b = 43 + static_cast<int>((255 - 43) * (1 - t));
  } else {
    r = 33 + static_cast<int>((255 - 33) * (1 + t));
    gcol = 102 + static_cast<int>((255 - 102) * (1 + t));
    b = 172 + static_cast<int>((255 - 172) * (1 + t));
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, gcol, b);
  return std::string(buf);
}

}  // namespace

void export_heatmap(const CommunityMatrix& m, const std::string& path) {
  if (!m.weights_filled) throw std::invalid_argument("export_heatmap: weights not filled");
  const std::size_t c = m.size();
  double max_abs = 0;
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      if (m.weight_defined(i, j)) max_abs = std::max(max_abs, std::fabs(m.weight(i, j)));
    }
  }
  if (max_abs == 0) max_abs = 1;  // all-zero weights render uniform white

  const int cell = 22;
  const int gutter = 150;
  const int width = gutter + cell * static_cast<int>(c) + 20;
  const int height = gutter + cell * static_cast<int>(c) + 20;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" font-family=\"sans-serif\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"8\" y=\"16\" font-size=\"12\">cited community (rows) vs citing community "
         "(columns); shade = deviation from expected flow</text>\n";

  for (std::size_t i = 0; i < c; ++i) {
    const int y = gutter + static_cast<int>(i) * cell;
    svg += "<text x=\"" + std::to_string(gutter - 6) + "\" y=\"" + std::to_string(y + cell - 7) +
           "\" font-size=\"10\" text-anchor=\"end\">" + xml_escape(m.labels[i]) + "</text>\n";
    const int x_top = gutter + static_cast<int>(i) * cell;
    svg += "<text x=\"" + std::to_string(x_top + cell / 2) + "\" y=\"" +
           std::to_string(gutter - 6) + "\" font-size=\"10\" text-anchor=\"start\" transform=\"rotate(-60 " +
           std::to_string(x_top + cell / 2) + " " + std::to_string(gutter - 6) + ")\">" +
           xml_escape(m.labels[i]) + "</text>\n";
  }
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const int x = gutter + static_cast<int>(j) * cell;
      const int y = gutter + static_cast<int>(i) * cell;
      std::string fill = "#cccccc";
      std::string title = "NA";
      if (m.weight_defined(i, j)) {
        const double w = m.weight(i, j);
        fill = shade(w / max_abs);
        title = format_fixed(w, 3);
      }
      svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
             std::to_string(cell - 1) + "\" height=\"" + std::to_string(cell - 1) + "\" fill=\"" +
             fill + "\"><title>" + xml_escape(m.labels[i]) + " -> " + xml_escape(m.labels[j]) +
             ": " + title + "</title></rect>\n";
    }
  }
  svg += "</svg>\n";
  write_file(path, svg);
}

}  // namespace citeflow
