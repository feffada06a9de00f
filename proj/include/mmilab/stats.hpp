// include/mmilab/stats.hpp
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

#ifndef MMILAB_STATS_HPP
#define MMILAB_STATS_HPP

#include <vector>

#include "mmilab/model.hpp"

namespace mmilab {

// Per-Gaussian occupancy and moment accumulators. Merging is plain
// addition; reductions happen in fixed utterance order for reproducibility.
struct SufficientStats {
  std::vector<double> occ;                  // gamma per Gaussian
  std::vector<std::vector<double>> m1;      // sum gamma * y
  std::vector<std::vector<double>> m2;      // sum gamma * y^2, element-wise

  SufficientStats() = default;
  SufficientStats(int num_states, int dim)
      : occ(num_states, 0.0),
        m1(num_states, std::vector<double>(dim, 0.0)),
        m2(num_states, std::vector<double>(dim, 0.0)) {}

  int num_states() const { return static_cast<int>(occ.size()); }

  void add_frame(int state, double gamma, const FeatureVector& y) {
    occ[state] += gamma;
    auto& a = m1[state];
    auto& b = m2[state];
    for (std::size_t i = 0; i < y.size(); ++i) {
      a[i] += gamma * y[i];
      b[i] += gamma * y[i] * y[i];
    }
  }

  void add(const SufficientStats& other) {
    for (int s = 0; s < num_states(); ++s) {
      occ[s] += other.occ[s];
      for (std::size_t i = 0; i < m1[s].size(); ++i) {
        m1[s][i] += other.m1[s][i];
        m2[s][i] += other.m2[s][i];
      }
    }
  }
};

}  // namespace mmilab

#endif  // MMILAB_STATS_HPP
