#include "ermakov/app/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ermakov::app {

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 80, kRight = 160, kTop = 40, kBottom = 60;
constexpr const char* kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
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

std::string fixed(double v, int digits = 2) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

std::string tick_label(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

struct Range {
  double lo{INFINITY}, hi{-INFINITY};
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(hi > lo)) {
      const double d = std::isfinite(lo) && lo != 0 ? std::abs(lo) * 0.05 : 1.0;
      lo = std::isfinite(lo) ? lo - d : 0;
      hi = std::isfinite(hi) ? hi + d : 1;
    }
  }
};

}  // namespace

std::string render_svg(const Chart& chart) {
  Range xr, yr;
  for (const auto& s : chart.series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.pad();
  yr.pad();
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + (1 - (y - yr.lo) / (yr.hi - yr.lo)) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(chart.title)
    << "</text>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double xv = xr.lo + (xr.hi - xr.lo) * k / 5, yv = yr.lo + (yr.hi - yr.lo) * k / 5;
    o << "<line x1=\"" << fixed(px(xv)) << "\" y1=\"" << kTop + ph << "\" x2=\"" << fixed(px(xv)) << "\" y2=\""
      << kTop + ph + 5 << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fixed(px(xv)) << "\" y=\"" << kTop + ph + 19 << "\" text-anchor=\"middle\">"
      << tick_label(xv) << "</text>\n";
    o << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << fixed(py(yv)) << "\" x2=\"" << kLeft << "\" y2=\""
      << fixed(py(yv)) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << kLeft - 8 << "\" y=\"" << fixed(py(yv) + 4) << "\" text-anchor=\"end\">" << tick_label(yv)
      << "</text>\n";
  }
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
    << escape(chart.x_label) << "</text>\n";
  o << "<text x=\"18\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << kTop + ph / 2 << ")\">" << escape(chart.y_label) << "</text>\n";

  for (std::size_t i = 0; i < chart.series.size(); ++i) {
    const auto& s = chart.series[i];
    const char* colour = kColours[i % std::size(kColours)];
    o << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      o << (k ? " " : "") << fixed(px(s.x[k])) << ',' << fixed(py(s.y[k]));
    }
    o << "\"/>\n";
    const double ly = kTop + 14 + 18 * static_cast<double>(i);
    o << "<line x1=\"" << kWidth - kRight + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kWidth - kRight + 32
      << "\" y2=\"" << ly - 4 << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << kWidth - kRight + 38 << "\" y=\"" << ly << "\">" << escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_svg(const std::filesystem::path& path, const Chart& chart) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << render_svg(chart);
}

Chart chart_from_table(const Table& table, const std::string& title) {
  Chart c;
  c.title = title;
  c.x_label = "t";
  c.y_label = "sigma";
  const std::size_t ct = table.column("t"), cs = table.column("sigma");
  // swept parameters and beta split the rows into separate lines
  std::vector<std::size_t> keys;
  for (std::size_t k = 0; k < table.header.size(); ++k) {
    const auto& h = table.header[k];
    if (h != "t" && h != "sigma" && h != "sigma_dot" && h != "energy") keys.push_back(k);
  }
  std::map<std::vector<double>, Series> groups;
  for (const auto& row : table.rows) {
    std::vector<double> key;
    for (std::size_t k : keys) key.push_back(row[k]);
    auto& s = groups[key];
    s.x.push_back(row[ct]);
    s.y.push_back(row[cs]);
  }
  std::vector<std::pair<std::vector<double>, Series>> all(groups.begin(), groups.end());
  const std::size_t keep = std::min<std::size_t>(8, all.size());
  for (std::size_t k = 0; k < keep; ++k) {
    const std::size_t idx = keep == 1 ? 0 : k * (all.size() - 1) / (keep - 1);
    auto& [key, series] = all[idx];
    series.label = keys.empty() ? "sigma" : "";
    for (std::size_t i = 0; i < keys.size(); ++i)
      series.label += (i ? " " : "") + table.header[keys[i]] + "=" + tick_label(key[i]);
    c.series.push_back(series);
  }
  return c;
}

}  // namespace ermakov::app
