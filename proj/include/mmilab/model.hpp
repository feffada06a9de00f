// include/mmilab/model.hpp
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

#ifndef MMILAB_MODEL_HPP
#define MMILAB_MODEL_HPP

#include <string>
#include <vector>

#include "mmilab/common.hpp"

namespace mmilab {

using FeatureVector = std::vector<double>;
using FrameSequence = std::vector<FeatureVector>;

// Single multivariate normal with diagonal covariance.
struct DiagonalGaussian {
  std::vector<double> mean;
  std::vector<double> var;  // per-dimension sigma^2

  int dim() const { return static_cast<int>(mean.size()); }
};

// log N(y; mean, diag(var)), constants included:
//   -1/2 sum_i [ (y_i - mu_i)^2 / var_i + log var_i + log 2pi ]
double log_gaussian_density(const DiagonalGaussian& g, const FeatureVector& y);

// Left-to-right chain without skips. state_ids index AcousticModel::states.
// Each state has a self-loop; log_next of the last state is the exit
// probability of the whole phone.
struct PhoneTopology {
  std::vector<int> state_ids;
  std::vector<double> log_self;
  std::vector<double> log_next;

  int num_states() const { return static_cast<int>(state_ids.size()); }
};

// The parameter point theta: per-state diagonal Gaussians plus the fixed
// HMM transition structure. Transition probabilities are set at task
// generation time and never re-estimated; trainers touch means and
// variances only, and every variance stays at or above the floor.
struct AcousticModel {
  int dim = 0;
  std::vector<std::string> phones;           // phone id -> name
  std::vector<PhoneTopology> topologies;     // one per phone
  std::vector<DiagonalGaussian> states;
  std::vector<double> floor;                 // per-dimension variance floor
  int silence_phone = -1;                    // -1 when the task has none
  double log_silence = kLogZero;             // branch prob of entering an
  double log_no_silence = 0.0;               // optional silence slot

  int num_states() const { return static_cast<int>(states.size()); }
  bool same_architecture(const AcousticModel& other) const;
  // Throws ContractError when indices, row sums, or floors are broken.
  void validate() const;
};

// Euclidean norm of the stacked mean/variance difference (the distance on
// the closed parameter space of means and variances).
double parameter_distance(const AcousticModel& a, const AcousticModel& b);

// Number of variance components sitting exactly at the floor.
int count_floored(const AcousticModel& model);

}  // namespace mmilab

#endif  // MMILAB_MODEL_HPP
