// include/mmilab/task.hpp
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

#ifndef MMILAB_TASK_HPP
#define MMILAB_TASK_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mmilab/lexicon.hpp"
#include "mmilab/model.hpp"

namespace mmilab {

// Everything needed to generate a desk-scale task deterministically.
struct TaskSpec {
  int vocab_size = 5;
  int phone_count = 5;
  int phones_per_word_min = 2;
  int phones_per_word_max = 3;
  int feature_dim = 4;
  double frames_per_state = 2.0;  // mean state duration
  int train_utterances = 200;
  int test_utterances = 50;
  double mean_separation = 1.5;   // in units of the true sigma
  std::uint64_t seed = 7;
  // Generator knobs beyond the core counts.
  int utterance_words_min = 2;
  int utterance_words_max = 3;
  SilencePolicy silence = SilencePolicy::kOptionalBoundary;
  double silence_prob = 0.5;
  double bigram_zero_fraction = 0.2;   // structural-zero mask density
  double variance_floor_fraction = 0.01;

  void validate() const;
};

struct Utterance {
  std::string id;
  FrameSequence frames;
  Transcription reference;
  // Sampled emitting-state sequence; generation diagnostic, not persisted.
  std::vector<int> gen_states;

  int num_frames() const { return static_cast<int>(frames.size()); }
};

struct Corpus {
  std::vector<Utterance> utterances;

  int size() const { return static_cast<int>(utterances.size()); }
  long total_frames() const;
};

struct TaskBundle {
  TaskSpec spec;
  Lexicon lexicon;
  BigramLm train_lm;  // lattice generation, training, train-set decoding
  BigramLm test_lm;   // test-set decoding only
  AcousticModel true_model;
  Corpus train;
  Corpus test;
};

// Deterministic in spec.seed; utterances use counter-based sub-seeds so
// generation order never changes results.
TaskBundle generate_task(const TaskSpec& spec);

// Per-dimension floor = fraction x total variance of that dimension over
// all frames. Requires 0 < fraction < 1 and at least two frames.
std::vector<double> variance_floor_from_corpus(const Corpus& corpus,
                                               double fraction);

}  // namespace mmilab

#endif  // MMILAB_TASK_HPP
