// Copyright 2026 The lau Authors
// SPDX-License-Identifier: Apache-2.0

#include "lau/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "lau/error.hpp"

namespace lau {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 70.0;

const char* kPalette[] = {"#4c78a8", "#f58518", "#54a24b",
                          "#e45756", "#72b7b2", "#b279a2"};
constexpr size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Round a raw interval up to a pleasant tick spacing (1/2/5 decades).
double nice_step(double span, size_t target_ticks) {
  if (!(span > 0.0)) return 1.0;
  double raw = span / static_cast<double>(target_ticks);
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double frac = raw / mag;
  double step;
  if (frac <= 1.0) step = 1.0;
  else if (frac <= 2.0) step = 2.0;
  else if (frac <= 5.0) step = 5.0;
  else step = 10.0;
  return step * mag;
}

void open_svg(std::ostream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << xml_escape(title)
      << "</text>\n";
}

void draw_y_axis(std::ostream& out, double y_min, double y_max,
                 const std::string& y_label) {
  const double plot_h = kHeight - kTop - kBottom;
  auto y_pos = [&](double v) {
    return kTop + plot_h * (1.0 - (v - y_min) / (y_max - y_min));
  };
  double step = nice_step(y_max - y_min, 5);
  double tick = std::ceil(y_min / step) * step;
  for (; tick <= y_max + 1e-12; tick += step) {
    double y = y_pos(tick);
    out << "<line x1=\"" << kLeft << "\" y1=\"" << num(y) << "\" x2=\""
        << kWidth - kRight << "\" y2=\"" << num(y)
        << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << num(tick) << "</text>\n";
  }
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  out << "<text x=\"16\" y=\"" << kTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"12\" transform=\"rotate(-90 16 " << kTop + plot_h / 2
      << ")\">" << xml_escape(y_label) << "</text>\n";
}

}  // namespace

void write_bar_chart_svg(const std::string& path, const std::string& title,
                         const std::string& y_label,
                         const std::vector<BarDatum>& bars) {
  if (bars.empty()) throw Error("bar chart needs at least one bar");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write chart: " + path);

  double y_max = 0.0;
  for (const BarDatum& b : bars) y_max = std::max(y_max, b.value);
  if (y_max <= 0.0) y_max = 1.0;
  y_max *= 1.08;  // headroom above the tallest bar
  const double y_min = 0.0;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto y_pos = [&](double v) {
    return kTop + plot_h * (1.0 - (v - y_min) / (y_max - y_min));
  };

  open_svg(out, title);
  draw_y_axis(out, y_min, y_max, y_label);
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom
      << "\" x2=\"" << kWidth - kRight << "\" y2=\"" << kHeight - kBottom
      << "\" stroke=\"black\"/>\n";

  const double slot = plot_w / static_cast<double>(bars.size());
  const double bar_w = slot * 0.65;
  for (size_t i = 0; i < bars.size(); ++i) {
    double x = kLeft + slot * (static_cast<double>(i) + 0.5);
    double top = y_pos(bars[i].value);
    out << "<rect x=\"" << num(x - bar_w / 2) << "\" y=\"" << num(top)
        << "\" width=\"" << num(bar_w) << "\" height=\""
        << num(kHeight - kBottom - top) << "\" fill=\""
        << kPalette[i % kPaletteSize] << "\"/>\n";
    out << "<text x=\"" << num(x) << "\" y=\"" << num(top - 4)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"10\">" << num(bars[i].value) << "</text>\n";
    out << "<text x=\"" << num(x) << "\" y=\"" << kHeight - kBottom + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << xml_escape(bars[i].label) << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw Error("write failed: " + path);
}

void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::string& x_label,
                          const std::string& y_label,
                          const std::vector<Series>& series) {
  if (series.empty()) throw Error("line chart needs at least one series");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write chart: " + path);

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  size_t total_points = 0;
  for (const Series& s : series) {
    for (const auto& [x, y] : s.points) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
      ++total_points;
    }
  }
  if (total_points == 0) throw Error("line chart series are all empty");
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) {
    y_max += 0.5;
    y_min -= 0.5;
  } else {
    double pad = (y_max - y_min) * 0.05;
    y_max += pad;
    y_min -= pad;
  }

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto x_pos = [&](double v) {
    return kLeft + plot_w * (v - x_min) / (x_max - x_min);
  };
  auto y_pos = [&](double v) {
    return kTop + plot_h * (1.0 - (v - y_min) / (y_max - y_min));
  };

  open_svg(out, title);
  draw_y_axis(out, y_min, y_max, y_label);
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom
      << "\" x2=\"" << kWidth - kRight << "\" y2=\"" << kHeight - kBottom
      << "\" stroke=\"black\"/>\n";

  double x_step = nice_step(x_max - x_min, 6);
  double tick = std::ceil(x_min / x_step) * x_step;
  for (; tick <= x_max + 1e-12; tick += x_step) {
    double x = x_pos(tick);
    out << "<line x1=\"" << num(x) << "\" y1=\"" << kHeight - kBottom
        << "\" x2=\"" << num(x) << "\" y2=\"" << kHeight - kBottom + 4
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(x) << "\" y=\"" << kHeight - kBottom + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << num(tick) << "</text>\n";
  }
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 28
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"12\">" << xml_escape(x_label) << "</text>\n";

  for (size_t s = 0; s < series.size(); ++s) {
    if (series[s].points.empty()) continue;
    const char* color = kPalette[s % kPaletteSize];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : series[s].points) {
      out << num(x_pos(x)) << "," << num(y_pos(y)) << " ";
    }
    out << "\"/>\n";
    // Legend entry, top-right corner, stacked.
    double ly = kTop + 14.0 * static_cast<double>(s);
    out << "<line x1=\"" << kWidth - kRight - 120 << "\" y1=\"" << num(ly)
        << "\" x2=\"" << kWidth - kRight - 100 << "\" y2=\"" << num(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kWidth - kRight - 94 << "\" y=\"" << num(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << xml_escape(series[s].name) << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw Error("write failed: " + path);
}

}  // namespace lau
