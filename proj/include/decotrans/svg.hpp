#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

namespace decotrans {

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool dashed = false;
};

/// Minimal built-in SVG 1.1 line plot: axes, ticks, legend, optional dashed
/// vertical markers. Non-finite points break the polyline.
inline void write_svg_plot(std::ostream& out, const std::string& title,
                           const std::string& xlabel, const std::string& ylabel,
                           const std::vector<SvgSeries>& series,
                           const std::vector<double>& vlines = {}) {
  constexpr double w = 640, h = 460;
  constexpr double ml = 70, mr = 20, mt = 40, mb = 50;
  const char* palette[] = {"#1f6fb4", "#d1495b", "#2e8b57", "#8860b0", "#c88a2a", "#4a4a4a"};

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  for (double v : vlines) {
    xmin = std::min(xmin, v);
    xmax = std::max(xmax, v);
  }
  if (xmin > xmax) {
    xmin = 0;
    xmax = 1;
  }
  if (ymin > ymax) {
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
  auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return std::string(buf);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << w
      << "\" height=\"" << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
      << "</text>\n";

  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
      << h - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    double x = xmin + (xmax - xmin) * i / 5.0;
    double y = ymin + (ymax - ymin) * i / 5.0;
    out << "<line x1=\"" << px(x) << "\" y1=\"" << h - mb << "\" x2=\"" << px(x) << "\" y2=\""
        << h - mb + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px(x) << "\" y=\"" << h - mb + 18 << "\" text-anchor=\"middle\">"
        << num(x) << "</text>\n";
    out << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(y) << "\" x2=\"" << ml << "\" y2=\""
        << py(y) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">" << num(y)
        << "</text>\n";
  }
  out << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 10
      << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  out << "<text x=\"16\" y=\"" << (mt + h - mb) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (mt + h - mb) / 2 << ")\">" << ylabel << "</text>\n";

  for (double v : vlines) {
    out << "<line x1=\"" << px(v) << "\" y1=\"" << mt << "\" x2=\"" << px(v) << "\" y2=\""
        << h - mb << "\" stroke=\"#999999\" stroke-dasharray=\"3,4\"/>\n";
  }

  int ci = 0;
  double ly = mt + 8;
  for (const auto& s : series) {
    const char* color = palette[ci % 6];
    std::string points;
    bool open = false;
    auto flush = [&]() {
      if (!points.empty())
        out << "<polyline fill=\"none\" stroke=\"" << color << "\""
            << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"" << points
            << "\"/>\n";
      points.clear();
      open = false;
    };
    for (auto [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) {
        flush();
        continue;
      }
      points += num(px(x)) + "," + num(py(y)) + " ";
      open = true;
    }
    (void)open;
    flush();
    out << "<line x1=\"" << w - mr - 150 << "\" y1=\"" << ly << "\" x2=\"" << w - mr - 130
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\""
        << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    out << "<text x=\"" << w - mr - 125 << "\" y=\"" << ly + 4 << "\">" << s.label
        << "</text>\n";
    ly += 16;
    ++ci;
  }
  out << "</svg>\n";
}

}  // namespace decotrans
