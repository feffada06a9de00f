// src/analysis.cpp
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

#include "mmilab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mmilab {

EigenDecomposition jacobi_eigen(const Matrix& sym) {
  const int n = static_cast<int>(sym.size());
  require(n >= 1, "jacobi_eigen: empty matrix");
  Matrix a = sym;
  for (int i = 0; i < n; ++i) {
    require(static_cast<int>(a[i].size()) == n, "jacobi_eigen: not square");
    for (int j = i + 1; j < n; ++j)
      require(std::abs(a[i][j] - a[j][i]) <= 1e-12 * (1.0 + std::abs(a[i][j])),
              "jacobi_eigen: not symmetric");
  }
  Matrix v(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) v[i][i] = 1.0;

  double norm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) norm += a[i][j] * a[i][j];
  const double stop = 1e-26 * std::max(1.0, norm);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += 2.0 * a[i][j] * a[i][j];
    if (off <= stop) break;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return a[x][x] < a[y][y]; });
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.assign(n, std::vector<double>(n));
  for (int k = 0; k < n; ++k) {
    out.values[k] = a[order[k]][order[k]];
    for (int i = 0; i < n; ++i) out.vectors[k][i] = v[i][order[k]];
    // Deterministic sign: the largest-magnitude component is positive.
    int arg = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(out.vectors[k][i]) > std::abs(out.vectors[k][arg])) arg = i;
    if (out.vectors[k][arg] < 0.0)
      for (double& x : out.vectors[k]) x = -x;
  }
  return out;
}

double log_unit_ball_volume(int dim) {
  return 0.5 * dim * std::log(M_PI) - std::lgamma(0.5 * dim + 1.0);
}

ScatterReport mean_scatter(const AcousticModel& model) {
  const int j = model.num_states();
  const int d = model.dim;
  require(j >= 2, "mean_scatter: needs >= 2 states");
  ScatterReport rep;
  rep.centroid.assign(d, 0.0);
  for (const auto& g : model.states)
    for (int i = 0; i < d; ++i) rep.centroid[i] += g.mean[i];
  for (double& c : rep.centroid) c /= j;
  rep.scatter.assign(d, std::vector<double>(d, 0.0));
  for (const auto& g : model.states)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        rep.scatter[a][b] += (g.mean[a] - rep.centroid[a]) *
                             (g.mean[b] - rep.centroid[b]);
  for (auto& row : rep.scatter)
    for (double& x : row) x /= j;

  EigenDecomposition eig = jacobi_eigen(rep.scatter);
  rep.eigenvalues = std::move(eig.values);
  rep.eigenvectors = std::move(eig.vectors);
  if (rep.eigenvalues.front() > 0.0)
    rep.elongation = std::sqrt(rep.eigenvalues.back() / rep.eigenvalues.front());
  double log_det = 0.0;
  bool singular = false;
  for (double lam : rep.eigenvalues) {
    if (lam <= 0.0) {
      singular = true;
      break;
    }
    log_det += std::log(lam);
  }
  rep.log_volume =
      singular ? kLogZero : log_unit_ball_volume(d) + 0.5 * log_det;
  return rep;
}

std::optional<double> elongation_ratio(const ScatterReport& report) {
  return report.elongation;
}

double mahalanobis(const std::vector<double>& x, const std::vector<double>& y,
                   const Matrix& sigma) {
  const int d = static_cast<int>(x.size());
  require(static_cast<int>(y.size()) == d &&
              static_cast<int>(sigma.size()) == d,
          "mahalanobis: dimension mismatch");
  EigenDecomposition eig = jacobi_eigen(sigma);
  require(eig.values.front() > 1e-12 * std::max(1.0, eig.values.back()),
          "mahalanobis: singular covariance");
  double q = 0.0;
  for (int k = 0; k < d; ++k) {
    double dot = 0.0;
    for (int i = 0; i < d; ++i) dot += eig.vectors[k][i] * (x[i] - y[i]);
    q += dot * dot / eig.values[k];
  }
  return std::sqrt(q);
}

std::vector<std::array<double, 2>> project_means(
    const AcousticModel& model, const std::vector<double>& u_low,
    const std::vector<double>& u_high, const std::vector<double>& centroid) {
  require(static_cast<int>(u_low.size()) == model.dim &&
              static_cast<int>(u_high.size()) == model.dim &&
              static_cast<int>(centroid.size()) == model.dim,
          "project_means: dimension mismatch");
  std::vector<std::array<double, 2>> out;
  out.reserve(model.states.size());
  for (const auto& g : model.states) {
    double a = 0.0, b = 0.0;
    for (int i = 0; i < model.dim; ++i) {
      const double c = g.mean[i] - centroid[i];
      a += c * u_low[i];
      b += c * u_high[i];
    }
    out.push_back({a, b});
  }
  return out;
}

VarianceVolumeReport variance_volume_change(const AcousticModel& before,
                                            const AcousticModel& after) {
  require(before.same_architecture(after),
          "variance_volume_change: architecture mismatch");
  VarianceVolumeReport rep;
  rep.v.reserve(before.states.size());
  int neg = 0;
  for (std::size_t s = 0; s < before.states.size(); ++s) {
    double acc = 0.0;
    for (int i = 0; i < before.dim; ++i)
      acc += 0.5 * std::log(after.states[s].var[i] / before.states[s].var[i]);
    rep.v.push_back(acc);
    if (acc < 0.0) ++neg;
  }
  rep.fraction_negative =
      rep.v.empty() ? 0.0 : static_cast<double>(neg) / rep.v.size();
  return rep;
}

}  // namespace mmilab
