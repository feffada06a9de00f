// tools/mmilab.cpp
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

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mmilab/commands.hpp"
#include "mmilab/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "mmilab: a desk-scale lab for lattice-based discriminative training "
      "of hidden Markov models"};
  app.require_subcommand(1);

  std::string config, out, bundle, model, model_a, model_b;
  std::uint64_t seed = 0;
  int iters = -1, ml_iters = 20, jobs = 0;
  std::string regime;
  double ebw_e = -1.0;

  auto collect_overrides = [&]() {
    mmilab::RunOverrides ov;
    if (seed != 0) ov.seed = seed;
    if (iters >= 0) ov.iters = iters;
    if (!regime.empty()) ov.regime = regime;
    if (ebw_e >= 0.0) ov.ebw_e = ebw_e;
    if (jobs > 0) ov.jobs = jobs;
    return ov;
  };

  auto* gen = app.add_subcommand("gen", "Generate a synthetic task bundle");
  gen->add_option("--config", config, "Run config (JSON)")->required();
  gen->add_option("--out", out, "Output bundle directory")->required();
  gen->add_option("--seed", seed, "Override the task seed");
  gen->callback([&]() {
    std::exit(mmilab::run_cli_action(
        [&]() { mmilab::cmd_gen(config, out, collect_overrides()); }));
  });

  auto* train = app.add_subcommand(
      "train-ml", "Baum-Welch maximum-likelihood training from a flat start");
  train->add_option("--bundle", bundle, "Task bundle directory")->required();
  train->add_option("--iters", ml_iters, "Baum-Welch iterations");
  train->add_option("--out", out, "Output directory")->required();
  train->add_option("--jobs", jobs, "Worker threads (default MMILAB_JOBS)");
  train->callback([&]() {
    std::exit(mmilab::run_cli_action(
        [&]() { mmilab::cmd_train_ml(bundle, ml_iters, out, jobs); }));
  });

  auto* run = app.add_subcommand(
      "run", "Run extended Baum-Welch under a lattice-refresh regime");
  run->add_option("--bundle", bundle, "Task bundle directory")->required();
  run->add_option("--config", config, "Run config (JSON)")->required();
  run->add_option("--model", model, "Seed model (default <bundle>/mle.json)");
  run->add_option("--out", out, "Output directory")->required();
  run->add_option("--iters", iters, "Override iteration count");
  run->add_option("--regime", regime,
                  "fixed | regenerate-all | regenerate-phone-marks");
  run->add_option("--E", ebw_e, "Override the EBW smoothing constant");
  run->add_option("--jobs", jobs, "Worker threads (default MMILAB_JOBS)");
  run->callback([&]() {
    std::exit(mmilab::run_cli_action([&]() {
      mmilab::cmd_run_regime(bundle, config, model, out, collect_overrides());
    }));
  });

  auto* analyze = app.add_subcommand(
      "analyze", "Compare the parameter geometry of two model snapshots");
  analyze->add_option("--model-a", model_a, "Baseline model JSON")->required();
  analyze->add_option("--model-b", model_b, "Comparison model JSON")
      ->required();
  analyze->add_option("--out", out, "Output directory")->required();
  analyze->callback([&]() {
    std::exit(mmilab::run_cli_action(
        [&]() { mmilab::cmd_analyze(model_a, model_b, out); }));
  });

  auto* dump = app.add_subcommand("default-config",
                                  "Print the default run config to stdout");
  dump->callback([&]() {
    std::cout << mmilab::default_config_text();
    std::exit(0);
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}
