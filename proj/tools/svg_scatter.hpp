#pragma once

#include <citeflow/io.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace citeflow::cli {

// Minimal log-log scatter used for degree and cascade-size tail plots.
// Output depends only on the points, so the file is byte-reproducible.
inline std::string svg_loglog_scatter(const std::string& title, const std::string& x_label,
                                      const std::string& y_label,
                                      const std::vector<std::pair<double, double>>& points) {
  const double width = 640, height = 480;
  const double ml = 70, mr = 20, mt = 40, mb = 50;

  double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
  std::vector<std::pair<double, double>> logs;
  for (const auto& [x, y] : points) {
    if (!(x > 0) || !(y > 0)) continue;  // log scale
    const double lx = std::log10(x), ly = std::log10(y);
    logs.emplace_back(lx, ly);
    min_x = std::min(min_x, lx);
    max_x = std::max(max_x, lx);
    min_y = std::min(min_y, ly);
    max_y = std::max(max_y, ly);
  }
  if (logs.empty()) {
    min_x = min_y = 0;
    max_x = max_y = 1;
  }
  if (max_x - min_x < 1e-12) max_x = min_x + 1;
  if (max_y - min_y < 1e-12) max_y = min_y + 1;

  const auto px = [&](double lx) {
    return ml + (lx - min_x) / (max_x - min_x) * (width - ml - mr);
  };
  const auto py = [&](double ly) {
    return height - mb - (ly - min_y) / (max_y - min_y) * (height - mt - mb);
  };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
       "viewBox=\"0 0 640 480\">\n";
  s += "<rect width=\"640\" height=\"480\" fill=\"#ffffff\"/>\n";
  s += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"16\">" + title + "</text>\n";

  // axes
  s += "<line x1=\"" + format_fixed(ml, 1) + "\" y1=\"" + format_fixed(height - mb, 1) +
       "\" x2=\"" + format_fixed(width - mr, 1) + "\" y2=\"" + format_fixed(height - mb, 1) +
       "\" stroke=\"#333333\"/>\n";
  s += "<line x1=\"" + format_fixed(ml, 1) + "\" y1=\"" + format_fixed(mt, 1) + "\" x2=\"" +
       format_fixed(ml, 1) + "\" y2=\"" + format_fixed(height - mb, 1) +
       "\" stroke=\"#333333\"/>\n";

  // decade ticks
  for (int d = static_cast<int>(std::ceil(min_x)); d <= static_cast<int>(std::floor(max_x)); ++d) {
    const double x = px(d);
    s += "<line x1=\"" + format_fixed(x, 1) + "\" y1=\"" + format_fixed(height - mb, 1) +
         "\" x2=\"" + format_fixed(x, 1) + "\" y2=\"" + format_fixed(height - mb + 5, 1) +
         "\" stroke=\"#333333\"/>\n";
    s += "<text x=\"" + format_fixed(x, 1) + "\" y=\"" + format_fixed(height - mb + 20, 1) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">1e" +
         std::to_string(d) + "</text>\n";
  }
  for (int d = static_cast<int>(std::ceil(min_y)); d <= static_cast<int>(std::floor(max_y)); ++d) {
    const double y = py(d);
    s += "<line x1=\"" + format_fixed(ml - 5, 1) + "\" y1=\"" + format_fixed(y, 1) + "\" x2=\"" +
         format_fixed(ml, 1) + "\" y2=\"" + format_fixed(y, 1) + "\" stroke=\"#333333\"/>\n";
    s += "<text x=\"" + format_fixed(ml - 8, 1) + "\" y=\"" + format_fixed(y + 4, 1) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" +
         std::to_string(d) + "</text>\n";
  }

  s += "<text x=\"" + format_fixed((ml + width - mr) / 2, 1) + "\" y=\"" +
       format_fixed(height - 10, 1) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + x_label +
       "</text>\n";
  s += "<text x=\"16\" y=\"" + format_fixed((mt + height - mb) / 2, 1) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 "
       "16 " + format_fixed((mt + height - mb) / 2, 1) + ")\">" + y_label + "</text>\n";

  for (const auto& [lx, ly] : logs) {
    s += "<circle cx=\"" + format_fixed(px(lx), 2) + "\" cy=\"" + format_fixed(py(ly), 2) +
         "\" r=\"2.5\" fill=\"#2166ac\" fill-opacity=\"0.7\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace citeflow::cli
