// Standalone SVG rendering of the frontier: voltage swing vs average
// relative losses, one polyline per (scheme, limit_scale) traced by K.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "feedersim/metrics.hpp"

namespace feedersim {
namespace detail {

inline std::string fmt_coord(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

inline std::string fmt_tick(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

}  // namespace detail

inline void emit_frontier_svg(const std::vector<FrontierPoint>& points, const std::string& path) {
  if (points.empty()) throw std::invalid_argument("emit_frontier_svg: no points");

  // Series keyed by (scheme, scale), points ordered by k within a series.
  std::map<std::pair<std::string, double>, std::vector<FrontierPoint>> series;
  for (const FrontierPoint& p : points) series[{p.scheme, p.limit_scale}].push_back(p);
  for (auto& [key, pts] : series)
    std::sort(pts.begin(), pts.end(),
              [](const FrontierPoint& a, const FrontierPoint& b) { return a.k < b.k; });

  double x_min = points[0].avg_rel_loss, x_max = x_min;
  double y_min = points[0].swing_pu, y_max = y_min;
  for (const FrontierPoint& p : points) {
    x_min = std::min(x_min, p.avg_rel_loss);
    x_max = std::max(x_max, p.avg_rel_loss);
    y_min = std::min(y_min, p.swing_pu);
    y_max = std::max(y_max, p.swing_pu);
  }
  const double x_pad = std::max(0.02 * std::max(std::abs(x_max), 1.0), 0.5 * (x_max - x_min) * 0.1);
  const double y_pad = std::max(0.002, 0.05 * (y_max - y_min));
  x_min -= x_pad;
  x_max += x_pad;
  y_min = std::max(0.0, y_min - y_pad);
  y_max += y_pad;

  const double width = 800, height = 600;
  const double ml = 80, mr = 220, mt = 50, mb = 70;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * pw; };
  auto py = [&](double y) { return mt + ph - (y - y_min) / (y_max - y_min) * ph; };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  const int n_colors = 8;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_frontier_svg: cannot open " + path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
      << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n"
      << "<text x=\"" << detail::fmt_coord(ml + pw / 2) << "\" y=\"28\" font-size=\"18\" "
         "text-anchor=\"middle\" font-family=\"sans-serif\">Voltage swing vs average relative "
         "losses</text>\n";

  // axes
  out << "<line x1=\"" << detail::fmt_coord(ml) << "\" y1=\"" << detail::fmt_coord(mt + ph)
      << "\" x2=\"" << detail::fmt_coord(ml + pw) << "\" y2=\"" << detail::fmt_coord(mt + ph)
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << detail::fmt_coord(ml) << "\" y1=\"" << detail::fmt_coord(mt)
      << "\" x2=\"" << detail::fmt_coord(ml) << "\" y2=\"" << detail::fmt_coord(mt + ph)
      << "\" stroke=\"black\"/>\n";
  const int n_ticks = 5;
  for (int t = 0; t <= n_ticks; ++t) {
    const double xv = x_min + (x_max - x_min) * t / n_ticks;
    const double yv = y_min + (y_max - y_min) * t / n_ticks;
    out << "<line x1=\"" << detail::fmt_coord(px(xv)) << "\" y1=\"" << detail::fmt_coord(mt + ph)
        << "\" x2=\"" << detail::fmt_coord(px(xv)) << "\" y2=\""
        << detail::fmt_coord(mt + ph + 6) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << detail::fmt_coord(px(xv)) << "\" y=\""
        << detail::fmt_coord(mt + ph + 22) << "\" font-size=\"12\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\">" << detail::fmt_tick(xv) << "</text>\n"
        << "<line x1=\"" << detail::fmt_coord(ml - 6) << "\" y1=\"" << detail::fmt_coord(py(yv))
        << "\" x2=\"" << detail::fmt_coord(ml) << "\" y2=\"" << detail::fmt_coord(py(yv))
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << detail::fmt_coord(ml - 10) << "\" y=\""
        << detail::fmt_coord(py(yv) + 4) << "\" font-size=\"12\" text-anchor=\"end\" "
           "font-family=\"sans-serif\">" << detail::fmt_tick(yv) << "</text>\n";
  }
  out << "<text x=\"" << detail::fmt_coord(ml + pw / 2) << "\" y=\""
      << detail::fmt_coord(height - 20)
      << "\" font-size=\"14\" text-anchor=\"middle\" font-family=\"sans-serif\">average relative "
         "losses</text>\n"
      << "<text x=\"24\" y=\"" << detail::fmt_coord(mt + ph / 2)
      << "\" font-size=\"14\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "transform=\"rotate(-90 24 " << detail::fmt_coord(mt + ph / 2)
      << ")\">max voltage swing (pu)</text>\n";

  int color_idx = 0;
  double legend_y = mt + 10;
  for (const auto& [key, pts] : series) {
    const char* color = palette[color_idx % n_colors];
    ++color_idx;
    if (pts.size() > 1) {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
      for (const FrontierPoint& p : pts)
        out << detail::fmt_coord(px(p.avg_rel_loss)) << ',' << detail::fmt_coord(py(p.swing_pu))
            << ' ';
      out << "\"/>\n";
    }
    for (const FrontierPoint& p : pts)
      out << "<circle cx=\"" << detail::fmt_coord(px(p.avg_rel_loss)) << "\" cy=\""
          << detail::fmt_coord(py(p.swing_pu)) << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";

    std::string label = key.first;
    if (key.second != 1.0) label += " (scale " + detail::fmt_tick(key.second) + ")";
    const double lx = ml + pw + 16;
    out << "<line x1=\"" << detail::fmt_coord(lx) << "\" y1=\"" << detail::fmt_coord(legend_y)
        << "\" x2=\"" << detail::fmt_coord(lx + 24) << "\" y2=\"" << detail::fmt_coord(legend_y)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<circle cx=\"" << detail::fmt_coord(lx + 12) << "\" cy=\""
        << detail::fmt_coord(legend_y) << "\" r=\"3.5\" fill=\"" << color << "\"/>\n"
        << "<text x=\"" << detail::fmt_coord(lx + 32) << "\" y=\""
        << detail::fmt_coord(legend_y + 4) << "\" font-size=\"13\" font-family=\"sans-serif\">"
        << label << "</text>\n";
    legend_y += 22;
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("emit_frontier_svg: write failed: " + path);
}

}  // namespace feedersim
