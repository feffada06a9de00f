// include/mmilab/svg.hpp
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

#ifndef MMILAB_SVG_HPP
#define MMILAB_SVG_HPP

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace mmilab {

// Hand-rolled SVG line charts: the CSVs stay the ground truth, these are
// quick-look figures with labeled axes and a legend.
struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

void write_line_plot(const std::filesystem::path& path,
                     const std::string& title, const std::string& x_label,
                     const std::string& y_label,
                     const std::vector<PlotSeries>& series);

void write_scatter_plot(const std::filesystem::path& path,
                        const std::string& title, const std::string& x_label,
                        const std::string& y_label,
                        const std::vector<PlotSeries>& series);

void write_histogram(const std::filesystem::path& path,
                     const std::string& title, const std::string& x_label,
                     const std::vector<double>& values, int bins);

}  // namespace mmilab

#endif  // MMILAB_SVG_HPP
