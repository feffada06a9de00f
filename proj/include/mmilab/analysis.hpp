// include/mmilab/analysis.hpp
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

#ifndef MMILAB_ANALYSIS_HPP
#define MMILAB_ANALYSIS_HPP

#include <array>
#include <optional>
#include <vector>

#include "mmilab/model.hpp"

namespace mmilab {

using Matrix = std::vector<std::vector<double>>;  // dense, row-major

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  Matrix vectors;              // vectors[k] is the k-th (unit) eigenvector
};

// Cyclic Jacobi rotations on a symmetric matrix, iterated until the
// off-diagonal norm is negligible. Dimensions here are tiny (d <= 8), so
// no external solver is involved and the result is testable against
// closed forms.
EigenDecomposition jacobi_eigen(const Matrix& sym);

// Geometry of the cloud of state means: centroid, scatter matrix, its
// eigenstructure, the elongation sqrt(lambda_max/lambda_min), and the log
// ellipsoid volume log[V_d * sqrt(det T)] with V_d the unit-ball volume.
struct ScatterReport {
  std::vector<double> centroid;
  Matrix scatter;
  std::vector<double> eigenvalues;  // ascending
  Matrix eigenvectors;
  std::optional<double> elongation;  // empty when lambda_min <= 0
  double log_volume = kLogZero;      // kLogZero when T is singular
};

ScatterReport mean_scatter(const AcousticModel& model);

// sqrt(lambda_max / lambda_min); empty marks a degenerate scatter.
std::optional<double> elongation_ratio(const ScatterReport& report);

// sqrt((x-y)^t Sigma^-1 (x-y)); Sigma must be symmetric positive definite.
double mahalanobis(const std::vector<double>& x, const std::vector<double>& y,
                   const Matrix& sigma);

// 2-D coordinates of each state mean against an orthonormal basis pair.
std::vector<std::array<double, 2>> project_means(
    const AcousticModel& model, const std::vector<double>& u_low,
    const std::vector<double>& u_high, const std::vector<double>& centroid);

// Per-state log ratio of variance-box volumes after/before, and how many
// shrank.
struct VarianceVolumeReport {
  std::vector<double> v;  // V_j per state
  double fraction_negative = 0.0;
};

VarianceVolumeReport variance_volume_change(const AcousticModel& before,
                                            const AcousticModel& after);

// log of the d-dimensional unit-ball volume pi^(d/2) / Gamma(d/2 + 1).
double log_unit_ball_volume(int dim);

}  // namespace mmilab

#endif  // MMILAB_ANALYSIS_HPP
