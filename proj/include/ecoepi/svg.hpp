#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecoepi {

struct PlotSeries {
  std::string name;
  std::vector<double> values;
};

struct PlotData {
  std::string title;
  std::string x_label = "t";
  std::vector<double> times;
  std::vector<PlotSeries> series;
};

namespace detail {

inline std::string num(double v, const char* f = "%.2f") {
  char buf[48];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// Render an 800x500 line chart with 10-tick axes and a legend.
inline std::string render_svg(const PlotData& d) {
  if (d.times.empty() || d.series.empty()) throw std::invalid_argument("plot needs a non-empty series");
  for (const auto& s : d.series)
    if (s.values.size() != d.times.size())
      throw std::invalid_argument("series '" + s.name + "' does not match the time grid");

  constexpr double W = 800, H = 500, left = 70, right = 20, top = 40, bottom = 50;
  const double pw = W - left - right, ph = H - top - bottom;
  double x0 = d.times.front(), x1 = d.times.back();
  double y0 = HUGE_VAL, y1 = -HUGE_VAL;
  for (const auto& s : d.series)
    for (double v : s.values)
      if (std::isfinite(v)) {
        y0 = std::min(y0, v);
        y1 = std::max(y1, v);
      }
  if (!std::isfinite(y0)) y0 = 0.0, y1 = 1.0;
  if (y1 - y0 < 1e-12) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  if (x1 - x0 < 1e-12) x1 = x0 + 1.0;
  auto X = [&](double t) { return left + pw * (t - x0) / (x1 - x0); };
  auto Y = [&](double v) { return top + ph * (1.0 - (v - y0) / (y1 - y0)); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream os;
  using detail::num;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" viewBox=\"0 0 800 500\">\n";
  os << "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
  if (!d.title.empty())
    os << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
       << detail::escape_xml(d.title) << "</text>\n";
  os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\""
     << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 10; ++i) {
    const double fx = x0 + (x1 - x0) * i / 10.0, fy = y0 + (y1 - y0) * i / 10.0;
    os << "<line x1=\"" << num(X(fx)) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(X(fx)) << "\" y2=\""
       << num(top + ph + 5) << "\" stroke=\"black\"/>";
    os << "<text x=\"" << num(X(fx)) << "\" y=\"" << num(top + ph + 18)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << num(fx, "%.4g")
       << "</text>\n";
    os << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(Y(fy)) << "\" x2=\"" << num(left) << "\" y2=\""
       << num(Y(fy)) << "\" stroke=\"black\"/>";
    os << "<text x=\"" << num(left - 8) << "\" y=\"" << num(Y(fy) + 3)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << num(fy, "%.4g") << "</text>\n";
  }
  os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(H - 10)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << detail::escape_xml(d.x_label)
     << "</text>\n";
  for (std::size_t k = 0; k < d.series.size(); ++k) {
    const char* col = colors[k % 6];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < d.times.size(); ++i) {
      const double v = d.series[k].values[i];
      if (!std::isfinite(v)) continue;
      os << (i ? " " : "") << num(X(d.times[i])) << ',' << num(Y(v));
    }
    os << "\"/>\n";
    const double ly = top + 15 + 16 * static_cast<double>(k);
    os << "<line x1=\"" << num(left + pw - 90) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(left + pw - 70)
       << "\" y2=\"" << num(ly) << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>";
    os << "<text x=\"" << num(left + pw - 64) << "\" y=\"" << num(ly + 4)
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << detail::escape_xml(d.series[k].name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

/// Write the chart to `path`; nothing is created when the data is rejected.
inline void emit_plot(const PlotData& d, const std::string& path) {
  const std::string svg = render_svg(d);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write plot '" + path + "'");
  out << svg;
  if (!out) throw std::runtime_error("write failed for plot '" + path + "'");
}

}  // namespace ecoepi
