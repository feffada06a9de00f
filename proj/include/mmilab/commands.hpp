// include/mmilab/commands.hpp
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

#ifndef MMILAB_COMMANDS_HPP
#define MMILAB_COMMANDS_HPP

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "mmilab/config.hpp"

namespace mmilab {

// Thrown when a training command cannot produce a model at all.
class TrainingError : public std::runtime_error {
 public:
  explicit TrainingError(const std::string& msg) : std::runtime_error(msg) {}
};

// Exit codes: 0 ok, 2 config, 3 training, 4 criterion starvation, 5 I/O.
enum ExitCode {
  kExitOk = 0,
  kExitConfig = 2,
  kExitTraining = 3,
  kExitStarved = 4,
  kExitIo = 5,
};

// Overrides the CLI may apply on top of a config file.
struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> iters;
  std::optional<std::string> regime;
  std::optional<double> ebw_e;
  std::optional<int> jobs;
};

// Generates the task bundle described by the config into `out`.
void cmd_gen(const std::filesystem::path& config_path,
             const std::filesystem::path& out, const RunOverrides& ov = {});

// Baum-Welch from a flat start; writes mle.json and ml_log.csv into `out`.
void cmd_train_ml(const std::filesystem::path& bundle_dir, int iters,
                  const std::filesystem::path& out, int jobs = 0);

// One regime experiment: iteration_log.csv, lattices_train.lat, SVG plots,
// snapshots. The seed model defaults to <bundle>/mle.json.
void cmd_run_regime(const std::filesystem::path& bundle_dir,
                    const std::filesystem::path& config_path,
                    const std::filesystem::path& model_path,
                    const std::filesystem::path& out,
                    const RunOverrides& ov = {});

// Parameter-geometry comparison of two model snapshots.
void cmd_analyze(const std::filesystem::path& model_a_path,
                 const std::filesystem::path& model_b_path,
                 const std::filesystem::path& out);

// Maps an exception to the documented exit code, printing the message.
int run_cli_action(const std::function<void()>& action);

}  // namespace mmilab

#endif  // MMILAB_COMMANDS_HPP
