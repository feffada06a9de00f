// src/svg.cpp
//
// Copyright 2026 mmi-lab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mmilab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mmilab/common.hpp"

namespace mmilab {

namespace {

constexpr int kWidth = 800, kHeight = 500;
constexpr int kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Range {
  double lo = 0.0, hi = 1.0;

  void widen(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double map(double v, double a, double b) const {
    if (hi == lo) return 0.5 * (a + b);
    return a + (v - lo) / (hi - lo) * (b - a);
  }
};

void frame_and_axes(std::ostringstream& out, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const Range& xr, const Range& yr) {
  out << "<rect x='" << kLeft << "' y='" << kTop << "' width='"
      << kWidth - kLeft - kRight << "' height='" << kHeight - kTop - kBottom
      << "' fill='none' stroke='#333'/>\n";
  out << "<text x='" << kWidth / 2 << "' y='24' text-anchor='middle' "
      << "font-size='16'>" << title << "</text>\n";
  out << "<text x='" << kWidth / 2 << "' y='" << kHeight - 12
      << "' text-anchor='middle' font-size='13'>" << x_label << "</text>\n";
  out << "<text x='16' y='" << kHeight / 2
      << "' text-anchor='middle' font-size='13' transform='rotate(-90 16 "
      << kHeight / 2 << ")'>" << y_label << "</text>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = xr.lo + (xr.hi - xr.lo) * i / 5.0;
    const double px = xr.map(fx, kLeft, kWidth - kRight);
    out << "<line x1='" << num(px) << "' y1='" << kHeight - kBottom
        << "' x2='" << num(px) << "' y2='" << kHeight - kBottom + 5
        << "' stroke='#333'/>\n";
    out << "<text x='" << num(px) << "' y='" << kHeight - kBottom + 18
        << "' text-anchor='middle' font-size='11'>" << num(fx) << "</text>\n";
    const double fy = yr.lo + (yr.hi - yr.lo) * i / 5.0;
    const double py = yr.map(fy, kHeight - kBottom, kTop);
    out << "<line x1='" << kLeft - 5 << "' y1='" << num(py) << "' x2='"
        << kLeft << "' y2='" << num(py) << "' stroke='#333'/>\n";
    out << "<text x='" << kLeft - 8 << "' y='" << num(py + 4)
        << "' text-anchor='end' font-size='11'>" << num(fy) << "</text>\n";
  }
}

void write_xy_plot(const std::filesystem::path& path, const std::string& title,
                   const std::string& x_label, const std::string& y_label,
                   const std::vector<PlotSeries>& series, bool lines) {
  Range xr, yr;
  bool first = true;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (first) {
        xr.lo = xr.hi = x;
        yr.lo = yr.hi = y;
        first = false;
      }
      xr.widen(x);
      yr.widen(y);
    }

  std::ostringstream out;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth
      << "' height='" << kHeight << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  frame_and_axes(out, title, x_label, y_label, xr, yr);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % 6];
    if (lines) {
      out << "<polyline fill='none' stroke='" << color
          << "' stroke-width='1.5' points='";
      for (const auto& [x, y] : series[i].points) {
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        out << num(xr.map(x, kLeft, kWidth - kRight)) << ","
            << num(yr.map(y, kHeight - kBottom, kTop)) << " ";
      }
      out << "'/>\n";
    } else {
      for (const auto& [x, y] : series[i].points) {
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        out << "<circle cx='" << num(xr.map(x, kLeft, kWidth - kRight))
            << "' cy='" << num(yr.map(y, kHeight - kBottom, kTop))
            << "' r='2.5' fill='" << color << "'/>\n";
      }
    }
    out << "<text x='" << kWidth - kRight - 8 << "' y='"
        << kTop + 16 + 16 * static_cast<int>(i)
        << "' text-anchor='end' font-size='12' fill='" << color << "'>"
        << series[i].label << "</text>\n";
  }
  out << "</svg>\n";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << out.str();
}

}  // namespace

void write_line_plot(const std::filesystem::path& path,
                     const std::string& title, const std::string& x_label,
                     const std::string& y_label,
                     const std::vector<PlotSeries>& series) {
  write_xy_plot(path, title, x_label, y_label, series, /*lines=*/true);
}

void write_scatter_plot(const std::filesystem::path& path,
                        const std::string& title, const std::string& x_label,
                        const std::string& y_label,
                        const std::vector<PlotSeries>& series) {
  write_xy_plot(path, title, x_label, y_label, series, /*lines=*/false);
}

void write_histogram(const std::filesystem::path& path,
                     const std::string& title, const std::string& x_label,
                     const std::vector<double>& values, int bins) {
  require(bins >= 1, "write_histogram: bins < 1");
  double lo = 0.0, hi = 1.0;
  if (!values.empty()) {
    lo = *std::min_element(values.begin(), values.end());
    hi = *std::max_element(values.begin(), values.end());
    if (hi == lo) hi = lo + 1.0;
  }
  std::vector<int> counts(bins, 0);
  for (double v : values) {
    int b = static_cast<int>((v - lo) / (hi - lo) * bins);
    counts[std::clamp(b, 0, bins - 1)]++;
  }
  const int peak = std::max(1, *std::max_element(counts.begin(), counts.end()));

  std::ostringstream out;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth
      << "' height='" << kHeight << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  Range xr{lo, hi}, yr{0.0, static_cast<double>(peak)};
  frame_and_axes(out, title, x_label, "count", xr, yr);
  const double bw = (kWidth - kLeft - kRight) / static_cast<double>(bins);
  for (int b = 0; b < bins; ++b) {
    const double h =
        (kHeight - kTop - kBottom) * counts[b] / static_cast<double>(peak);
    out << "<rect x='" << num(kLeft + b * bw) << "' y='"
        << num(kHeight - kBottom - h) << "' width='" << num(bw * 0.9)
        << "' height='" << num(h) << "' fill='#1f77b4'/>\n";
  }
  out << "</svg>\n";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << out.str();
}

}  // namespace mmilab
