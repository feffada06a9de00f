// include/mmilab/io.hpp
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

#ifndef MMILAB_IO_HPP
#define MMILAB_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmilab/lattice.hpp"
#include "mmilab/model.hpp"
#include "mmilab/task.hpp"
#include "mmilab/training.hpp"

namespace mmilab {

using ordered_json = nlohmann::ordered_json;

// Doubles print with 17 significant digits so every CSV field round-trips.
std::string format_double(double v);

// Versioned model document: header, floor vector, phone table, per-state
// mean/variance arrays, transitions. Log-domain zeros serialize as null.
ordered_json model_to_json(const AcousticModel& model);
AcousticModel model_from_json(const ordered_json& j);
void save_model(const AcousticModel& model, const std::filesystem::path& path);
AcousticModel load_model(const std::filesystem::path& path);

// Task bundle on disk: task.json (spec, lexicon, both LMs), true_model.json,
// corpus_train.json, corpus_test.json, manifest.json with content hashes.
void save_task_bundle(const TaskBundle& bundle,
                      const std::filesystem::path& dir);
TaskBundle load_task_bundle(const std::filesystem::path& dir);

// Phone-marked lattice text format, one file per corpus:
//   #mmi-lab-lattice v1
//   UTT <id> <n_frames>
//   ENTRY <lm_logprob> <word>+
//   ARC <phone> <start> <end>
// Entries are sorted by transcription; LF endings.
void save_lattices(const std::vector<PhoneMarkedLattice>& pmls,
                   const Lexicon& lex, const AcousticModel& model,
                   const std::filesystem::path& path);
// `corpus` (when given) re-identifies each lattice's reference entry.
std::vector<PhoneMarkedLattice> load_lattices(
    const std::filesystem::path& path, const Lexicon& lex,
    const AcousticModel& model, const Corpus* corpus = nullptr);

// IterationLog CSV, fixed column order; absent values stay blank.
void save_iteration_log(const IterationLog& log,
                        const std::filesystem::path& path);

// Per-iteration maximum-likelihood log: iter, ll_per_frame.
void save_ml_log(const std::vector<std::pair<int, double>>& rows,
                 const std::filesystem::path& path);

std::string file_hash_hex(const std::filesystem::path& path);
void write_manifest(const std::vector<std::filesystem::path>& files,
                    const std::filesystem::path& manifest_path);

void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

}  // namespace mmilab

#endif  // MMILAB_IO_HPP
