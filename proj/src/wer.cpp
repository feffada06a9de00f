// src/wer.cpp
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

#include "mmilab/wer.hpp"

#include <algorithm>
#include <cmath>

#include "mmilab/parallel.hpp"

namespace mmilab {

namespace {

struct Cell {
  int cost = 0;
  int sub = 0, del = 0, ins = 0;

  // Minimal cost first, then the most substitutions.
  bool better_than(const Cell& o) const {
    if (cost != o.cost) return cost < o.cost;
    return sub > o.sub;
  }
};

}  // namespace

EditCounts edit_distance(std::span<const int> hyp, std::span<const int> ref) {
  const int h = static_cast<int>(hyp.size());
  const int r = static_cast<int>(ref.size());
  std::vector<Cell> prev(r + 1), cur(r + 1);
  for (int j = 1; j <= r; ++j) {
    prev[j] = prev[j - 1];
    prev[j].cost += 1;
    prev[j].del += 1;
  }
  for (int i = 1; i <= h; ++i) {
    cur[0] = prev[0];
    cur[0].cost += 1;
    cur[0].ins += 1;
    for (int j = 1; j <= r; ++j) {
      Cell diag = prev[j - 1];
      if (hyp[i - 1] != ref[j - 1]) {
        diag.cost += 1;
        diag.sub += 1;
      }
      Cell del = cur[j - 1];
      del.cost += 1;
      del.del += 1;
      Cell ins = prev[j];
      ins.cost += 1;
      ins.ins += 1;
      Cell best = diag;
      if (del.better_than(best)) best = del;
      if (ins.better_than(best)) best = ins;
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  return EditCounts{prev[r].sub, prev[r].del, prev[r].ins};
}

namespace {

DecodeResult collect(const Corpus& corpus,
                     const std::vector<Transcription>& hyps) {
  DecodeResult res;
  res.hypotheses = hyps;
  for (int i = 0; i < corpus.size(); ++i) {
    const auto& ref = corpus.utterances[i].reference.words;
    res.report.add(edit_distance(hyps[i].words, ref),
                   static_cast<int>(ref.size()));
  }
  return res;
}

}  // namespace

DecodeResult decode_method_a(const AcousticModel& model, const Corpus& corpus,
                             const TranscriptionScorer& scorer, double kappa,
                             int jobs) {
  require(kappa > 0.0, "decode_method_a: kappa <= 0");
  auto hyps = parallel_map<Transcription>(corpus.size(), jobs, [&](int i) {
    const auto f = scorer.score(model, corpus.utterances[i].frames);
    const auto& lm = scorer.lm_log_probs();
    int best = -1;
    double best_score = kLogZero;
    for (std::size_t w = 0; w < f.size(); ++w) {
      if (f[w] == kLogZero) continue;
      const double s = f[w] / kappa + lm[w];
      if (best < 0 || s > best_score) {
        best = static_cast<int>(w);
        best_score = s;
      }
    }
    if (best < 0)
      throw EmptyCompositionError("decode_method_a: nothing aligns on " +
                                  corpus.utterances[i].id);
    return scorer.transcriptions()[best];
  });
  return collect(corpus, hyps);
}

DecodeResult rescore_method_b(const AcousticModel& model, const Corpus& corpus,
                              const std::vector<PhoneMarkedLattice>& pmls,
                              double kappa, const Lexicon& lex,
                              SilencePolicy silence, int jobs) {
  require(static_cast<int>(pmls.size()) == corpus.size(),
          "rescore_method_b: lattice/corpus mismatch");
  auto hyps = parallel_map<Transcription>(corpus.size(), jobs, [&](int i) {
    const auto& pml = pmls[i];
    const auto& frames = corpus.utterances[i].frames;
    int best = -1;
    double best_score = kLogZero;
    for (std::size_t e = 0; e < pml.entries.size(); ++e) {
      const double g =
          lattice_acoustic_score(model, frames, pml.entries[e], lex, silence);
      if (g == kLogZero) continue;
      const double s = g / kappa + pml.entries[e].lm_log_score;
      if (best < 0 || s > best_score) {
        best = static_cast<int>(e);
        best_score = s;
      }
    }
    if (best < 0)
      throw EmptyCompositionError("rescore_method_b: empty lattice on " +
                                  pml.utterance_id);
    return pml.entries[best].words;
  });
  return collect(corpus, hyps);
}

DecodeResult rescore_method_c(const AcousticModel& model, const Corpus& corpus,
                              const std::vector<WordLattice>& lattices,
                              double kappa, const Lexicon& lex,
                              SilencePolicy silence, int jobs) {
  require(static_cast<int>(lattices.size()) == corpus.size(),
          "rescore_method_c: lattice/corpus mismatch");
  auto hyps = parallel_map<Transcription>(corpus.size(), jobs, [&](int i) {
    const auto& frames = corpus.utterances[i].frames;
    const PhoneMarkedLattice pml =
        phone_mark(lattices[i], model, lex, frames, silence);
    int best = -1;
    double best_score = kLogZero;
    for (std::size_t e = 0; e < pml.entries.size(); ++e) {
      const double g =
          lattice_acoustic_score(model, frames, pml.entries[e], lex, silence);
      if (g == kLogZero) continue;
      const double s = g / kappa + pml.entries[e].lm_log_score;
      if (best < 0 || s > best_score) {
        best = static_cast<int>(e);
        best_score = s;
      }
    }
    if (best < 0)
      throw EmptyCompositionError("rescore_method_c: empty lattice on " +
                                  pml.utterance_id);
    return pml.entries[best].words;
  });
  return collect(corpus, hyps);
}

}  // namespace mmilab
