// include/mmilab/lattice.hpp
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

#ifndef MMILAB_LATTICE_HPP
#define MMILAB_LATTICE_HPP

#include <string>
#include <vector>

#include "mmilab/lexicon.hpp"
#include "mmilab/model.hpp"
#include "mmilab/stats.hpp"
#include "mmilab/task.hpp"

namespace mmilab {

struct LatticeConfig {
  double epsilon = 1e-4;          // posterior pruning threshold
  int max_len = 3;                // transcription-length cap for enumeration
  double kappa = 4.0;             // language-model scale
  std::size_t enumeration_cap = 1000000;
  SilencePolicy silence = SilencePolicy::kOptionalBoundary;

  void validate() const {
    require(epsilon > 0.0 && epsilon < 1.0, "lattice config: epsilon");
    require(kappa > 0.0, "lattice config: kappa");
    require(max_len >= 1, "lattice config: max_len");
  }
};

// Retained alternative transcriptions for one utterance, reference always
// included, entries sorted by transcription.
struct WordLattice {
  struct Entry {
    Transcription words;
    double acoustic_log_score = kLogZero;  // log f at generation; diagnostic
    double lm_log_score = kLogZero;
  };
  std::string utterance_id;
  std::vector<Entry> entries;
  int reference_index = -1;
  std::string model_tag;
  double epsilon = 0.0;
};

// Half-open frame span of one phone instance.
struct PhoneArc {
  int phone = -1;
  int start = 0;
  int end = 0;       // exclusive
  int word_pos = -1; // index into the entry's transcription; -1 for silence
};

struct PhoneMarkedLattice {
  struct Entry {
    Transcription words;
    double lm_log_score = kLogZero;
    std::vector<PhoneArc> arcs;
  };
  std::string utterance_id;
  int num_frames = 0;
  std::vector<Entry> entries;
  int reference_index = -1;
  std::string model_tag;
  int dropped_entries = 0;

  const Entry& reference() const {
    require(reference_index >= 0, "phone-marked lattice: no reference");
    return entries[reference_index];
  }
};

// Scores log f(x | w) for every transcription enumerable from the LM in a
// single forward pass over a shared word-prefix trie. The trie's transition
// structure is fixed by the task architecture, so one scorer serves every
// model of a run.
class TranscriptionScorer {
 public:
  TranscriptionScorer(const Lexicon& lex, const AcousticModel& architecture,
                      const BigramLm& lm, int max_len, SilencePolicy silence,
                      std::size_t enumeration_cap = 1000000);

  const std::vector<Transcription>& transcriptions() const { return trans_; }
  const std::vector<double>& lm_log_probs() const { return lm_logp_; }
  // Index of `t` in transcriptions(), or -1.
  int find(const Transcription& t) const;

  // log f_theta(x | w) for every transcription; kLogZero when the
  // transcription cannot emit exactly |frames| frames.
  std::vector<double> score(const AcousticModel& model,
                            const FrameSequence& frames) const;

 private:
  struct State {
    int gauss = -1;
    double log_self = kLogZero;
  };
  struct Arc {
    int src, dst;
    double log_prob;
  };
  struct Readout {
    int state;
    double log_prob;
  };

  std::vector<Transcription> trans_;
  std::vector<double> lm_logp_;
  std::vector<State> states_;
  std::vector<Arc> arcs_;                     // strictly forward, src < dst
  std::vector<std::pair<int, double>> init_;  // (state, entry log-prob)
  std::vector<std::vector<Readout>> readouts_;  // per transcription
  int num_gauss_ = 0;
};

// Entry posteriors over the enumeration: (1/kappa) log f + log p(w),
// normalized. Retains every hypothesis with posterior >= cfg.epsilon and
// unions the reference.
WordLattice generate_word_lattice(const AcousticModel& model,
                                  const TranscriptionScorer& scorer,
                                  const Utterance& utt,
                                  const LatticeConfig& cfg,
                                  const std::string& model_tag);

// Convenience overload that builds a throwaway scorer.
WordLattice generate_word_lattice(const AcousticModel& model,
                                  const Lexicon& lex, const BigramLm& lm,
                                  const Utterance& utt,
                                  const LatticeConfig& cfg,
                                  const std::string& model_tag = "");

// Forced alignment of each entry keeping only phone boundary times.
// Unalignable entries are dropped with a counter; an unalignable reference
// throws ReferenceStarvedError.
PhoneMarkedLattice phone_mark(const WordLattice& wl, const AcousticModel& model,
                              const Lexicon& lex, const FrameSequence& frames,
                              SilencePolicy silence);

// log g_theta(x | v ; R): per-arc anchored forward scores summed over the
// entry's spans, plus the silence branch probabilities the arc layout
// implies. Spans shorter than their topology score kLogZero.
double lattice_acoustic_score(const AcousticModel& model,
                              const FrameSequence& frames,
                              const PhoneMarkedLattice::Entry& entry,
                              const Lexicon& lex, SilencePolicy silence);

struct LatticeFbResult {
  double den_log_likelihood = kLogZero;
  std::vector<double> entry_posteriors;
  SufficientStats stats;  // occupancies carry the 1/kappa factor
};

// Arc-level forward-backward over the whole phone-marked lattice. Entry
// posteriors use (1/kappa) g + LM; within-arc state posteriors are
// unscaled; accumulated occupancy is scaled by 1/kappa to stay consistent
// with the criterion's gradient.
LatticeFbResult lattice_forward_backward(const AcousticModel& model,
                                         const FrameSequence& frames,
                                         const PhoneMarkedLattice& pml,
                                         double kappa, const Lexicon& lex,
                                         SilencePolicy silence,
                                         bool want_stats = true);

// Adds one entry's phone-arc forward-backward occupancies into `stats`,
// scaled by `weight` (which already carries entry posterior and 1/kappa).
void accumulate_entry_stats(const AcousticModel& model,
                            const FrameSequence& frames,
                            const PhoneMarkedLattice::Entry& entry,
                            double weight, SufficientStats* stats);

// Anchored span scoring shared with the rescoring paths: forward score of
// one phone spanning [begin, end) with entry pinned to the first state and
// exit from the last.
double anchored_span_score(const AcousticModel& model,
                           const PhoneTopology& topo,
                           const FrameSequence& frames, int begin, int end);

// Same plus per-frame state posteriors (posteriors[t][s], t relative to
// begin).
double anchored_span_fb(const AcousticModel& model, const PhoneTopology& topo,
                        const FrameSequence& frames, int begin, int end,
                        std::vector<std::vector<double>>* posteriors);

}  // namespace mmilab

#endif  // MMILAB_LATTICE_HPP
