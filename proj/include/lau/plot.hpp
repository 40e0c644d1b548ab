// Copyright 2026 The lau Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

namespace lau {

// Minimal self-contained SVG renderers for the two report figures: a bar
// chart of drift per configuration and line charts of loss curves. The
// accompanying CSVs are the data of record; these images are a convenience.

struct BarDatum {
  std::string label;
  double value = 0.0;
};

void write_bar_chart_svg(const std::string& path, const std::string& title,
                         const std::string& y_label,
                         const std::vector<BarDatum>& bars);

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;  // (x, y)
};

void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::string& x_label,
                          const std::string& y_label,
                          const std::vector<Series>& series);

}  // namespace lau
