// include/mmilab/config.hpp
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

#ifndef MMILAB_CONFIG_HPP
#define MMILAB_CONFIG_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "mmilab/lattice.hpp"
#include "mmilab/task.hpp"
#include "mmilab/training.hpp"

namespace mmilab {

// One experiment description: task generation, lattice and EBW settings,
// the regime, and the evaluation plan. JSON with sections; schema_version
// is mandatory and unknown keys are rejected with their full path.
struct RunConfig {
  TaskSpec task;
  LatticeConfig lattice;
  double ebw_e = 1.0;
  bool ebw_d_min_doubling = true;
  Regime regime = Regime::kFixedLattices;
  Objective objective = Objective::kMmi;
  int iterations = 100;
  int ml_iterations = 20;
  EvalPlan plan;
  std::vector<int> snapshot_iters;
  int jobs = 0;  // 0 = MMILAB_JOBS / hardware

  EbwConfig ebw_config() const {
    EbwConfig cfg;
    cfg.E = ebw_e;
    cfg.d_min_doubling = ebw_d_min_doubling;
    cfg.kappa = lattice.kappa;
    return cfg;
  }
};

RunConfig load_run_config(const std::filesystem::path& path);

// The config text this build treats as its defaults; written by tooling
// and tests so experiments are reproducible from a file.
std::string default_config_text();

}  // namespace mmilab

#endif  // MMILAB_CONFIG_HPP
