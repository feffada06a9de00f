// include/mmilab/lexicon.hpp
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

#ifndef MMILAB_LEXICON_HPP
#define MMILAB_LEXICON_HPP

#include <string>
#include <utility>
#include <vector>

#include "mmilab/common.hpp"
#include "mmilab/graph.hpp"
#include "mmilab/model.hpp"

namespace mmilab {

// Word identifiers index Lexicon::entries.
struct Transcription {
  std::vector<int> words;

  bool operator==(const Transcription& o) const { return words == o.words; }
  bool operator<(const Transcription& o) const { return words < o.words; }
  int length() const { return static_cast<int>(words.size()); }
};

// One pronunciation per word; phone ids index AcousticModel::phones.
struct Lexicon {
  std::vector<std::string> words;             // word id -> spelling
  std::vector<std::vector<int>> entries;      // word id -> phone ids

  int size() const { return static_cast<int>(words.size()); }
  // Phone expansion of a transcription, no silences.
  std::vector<int> phones_of(const Transcription& t) const;
};

// Bigram over word ids with begin/end pseudo-symbols. Structural zeros are
// kLogZero entries; each conditional row sums to one.
struct BigramLm {
  int vocab = 0;
  std::vector<double> log_begin;               // p(w | <s>), size vocab
  std::vector<std::vector<double>> log_trans;  // p(w' | w), [vocab][vocab]
  std::vector<double> log_end;                 // p(</s> | w), size vocab

  void validate() const;
};

double lm_log_prob(const BigramLm& lm, const Transcription& t);

enum class SilencePolicy { kNone, kOptionalBoundary, kOptionalEverywhere };

const char* to_string(SilencePolicy p);
SilencePolicy silence_policy_from_string(const std::string& s);

// Graph whose complete length-n paths are exactly the state sequences
// compatible with transcription t (optional silences per policy). Word
// labels sit on each word's entry arc, phone labels on each phone's.
DecodeGraph compile_utterance_graph(const Lexicon& lex,
                                    const AcousticModel& model,
                                    const Transcription& t,
                                    SilencePolicy silence);

// Bigram-weighted word loop for best-path recognition. LM log-probs ride
// the word entry arcs; the acoustic scale at decode time is the caller's.
DecodeGraph compile_decoding_graph(const Lexicon& lex, const BigramLm& lm,
                                   const AcousticModel& model,
                                   SilencePolicy silence);

// All transcriptions of length <= max_len with finite LM probability,
// in lexicographic word-id order. Throws ConfigError past `cap`.
std::vector<std::pair<Transcription, double>> enumerate_transcriptions(
    const BigramLm& lm, int max_len, std::size_t cap = 1000000);

// Recover the word sequence from a Viterbi result on a compiled graph.
Transcription words_of_path(const DecodeGraph& graph,
                            const std::vector<int>& path);

}  // namespace mmilab

#endif  // MMILAB_LEXICON_HPP
