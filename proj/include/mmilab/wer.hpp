// include/mmilab/wer.hpp
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

#ifndef MMILAB_WER_HPP
#define MMILAB_WER_HPP

#include <span>
#include <vector>

#include "mmilab/lattice.hpp"
#include "mmilab/lexicon.hpp"
#include "mmilab/task.hpp"

namespace mmilab {

struct EditCounts {
  int sub = 0;
  int del = 0;
  int ins = 0;

  int total() const { return sub + del + ins; }
};

// Unit-cost Levenshtein alignment; among minimal-cost alignments the one
// with the most substitutions wins (a substitution beats a paired
// insertion+deletion).
EditCounts edit_distance(std::span<const int> hyp, std::span<const int> ref);

struct WerReport {
  long sub = 0;
  long del = 0;
  long ins = 0;
  long ref_words = 0;

  double wer() const {
    return ref_words == 0 ? 0.0 : 100.0 * (sub + del + ins) / ref_words;
  }
  void add(const EditCounts& c, int ref_len) {
    sub += c.sub;
    del += c.del;
    ins += c.ins;
    ref_words += ref_len;
  }
};

struct DecodeResult {
  WerReport report;
  std::vector<Transcription> hypotheses;  // one per utterance
};

// Method A: full recognition with the current model, realized as the exact
// argmax of (1/kappa) log f + log p over the enumerable transcription set.
DecodeResult decode_method_a(const AcousticModel& model, const Corpus& corpus,
                             const TranscriptionScorer& scorer, double kappa,
                             int jobs = 1);

// Method B: rescore the stored entries of fixed phone-marked lattices with
// the current model and pick the best.
DecodeResult rescore_method_b(const AcousticModel& model, const Corpus& corpus,
                              const std::vector<PhoneMarkedLattice>& pmls,
                              double kappa, const Lexicon& lex,
                              SilencePolicy silence, int jobs = 1);

// Method C: keep the word lattices fixed but regenerate the phone-marks
// with the current model before rescoring.
DecodeResult rescore_method_c(const AcousticModel& model, const Corpus& corpus,
                              const std::vector<WordLattice>& lattices,
                              double kappa, const Lexicon& lex,
                              SilencePolicy silence, int jobs = 1);

}  // namespace mmilab

#endif  // MMILAB_WER_HPP
