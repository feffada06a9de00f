// src/model.cpp
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

#include "mmilab/model.hpp"

#include <cmath>

namespace mmilab {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

double log_gaussian_density(const DiagonalGaussian& g, const FeatureVector& y) {
  require(g.mean.size() == y.size() && g.var.size() == y.size(),
          "log_gaussian_density: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - g.mean[i];
    acc += d * d / g.var[i] + std::log(g.var[i]) + kLog2Pi;
  }
  return -0.5 * acc;
}

bool AcousticModel::same_architecture(const AcousticModel& other) const {
  if (dim != other.dim || phones != other.phones ||
      states.size() != other.states.size() ||
      topologies.size() != other.topologies.size())
    return false;
  for (std::size_t p = 0; p < topologies.size(); ++p)
    if (topologies[p].state_ids != other.topologies[p].state_ids) return false;
  return true;
}

void AcousticModel::validate() const {
  require(static_cast<int>(floor.size()) == dim, "model: floor dim mismatch");
  for (const auto& g : states) {
    require(g.dim() == dim && static_cast<int>(g.var.size()) == dim,
            "model: state dim mismatch");
    for (int i = 0; i < dim; ++i)
      require(g.var[i] >= floor[i] && floor[i] > 0.0,
              "model: variance below floor");
  }
  require(phones.size() == topologies.size(), "model: phone table mismatch");
  for (const auto& topo : topologies) {
    require(!topo.state_ids.empty(), "model: empty topology");
    require(topo.log_self.size() == topo.state_ids.size() &&
                topo.log_next.size() == topo.state_ids.size(),
            "model: topology transition shape");
    for (std::size_t s = 0; s < topo.state_ids.size(); ++s) {
      require(topo.state_ids[s] >= 0 && topo.state_ids[s] < num_states(),
              "model: dangling state index");
      const double row = std::exp(topo.log_self[s]) + std::exp(topo.log_next[s]);
      require(std::abs(row - 1.0) <= 1e-9, "model: transition row sum != 1");
    }
  }
  if (silence_phone >= 0) {
    require(silence_phone < static_cast<int>(phones.size()),
            "model: silence phone out of range");
    const double branch = std::exp(log_silence) + std::exp(log_no_silence);
    require(std::abs(branch - 1.0) <= 1e-9, "model: silence branch sum != 1");
  }
}

double parameter_distance(const AcousticModel& a, const AcousticModel& b) {
  require(a.same_architecture(b), "parameter_distance: architecture mismatch");
  double acc = 0.0;
  for (std::size_t j = 0; j < a.states.size(); ++j) {
    for (int i = 0; i < a.dim; ++i) {
      const double dm = a.states[j].mean[i] - b.states[j].mean[i];
      const double dv = a.states[j].var[i] - b.states[j].var[i];
      acc += dm * dm + dv * dv;
    }
  }
  return std::sqrt(acc);
}

int count_floored(const AcousticModel& model) {
  int n = 0;
  for (const auto& g : model.states)
    for (int i = 0; i < model.dim; ++i)
      if (g.var[i] <= model.floor[i]) ++n;
  return n;
}

}  // namespace mmilab
