// src/criteria.cpp
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

#include "mmilab/criteria.hpp"

#include <cmath>

#include "mmilab/parallel.hpp"
#include "mmilab/wer.hpp"

namespace mmilab {

double numerator_ll(const AcousticModel& model, const FrameSequence& frames,
                    const PhoneMarkedLattice& pml, double kappa,
                    const Lexicon& lex, SilencePolicy silence) {
  require(kappa > 0.0, "numerator_ll: kappa <= 0");
  const auto& ref = pml.reference();
  const double g = lattice_acoustic_score(model, frames, ref, lex, silence);
  if (g == kLogZero)
    throw ReferenceStarvedError("numerator_ll: reference starved on " +
                                pml.utterance_id);
  return g / kappa + ref.lm_log_score;
}

CriterionReport approx_mmi_criterion(
    const AcousticModel& model, const Corpus& corpus,
    const std::vector<PhoneMarkedLattice>& num_pmls,
    const std::vector<PhoneMarkedLattice>& den_pmls, double kappa,
    const Lexicon& lex, SilencePolicy silence, int jobs) {
  require(static_cast<int>(num_pmls.size()) == corpus.size() &&
              static_cast<int>(den_pmls.size()) == corpus.size(),
          "approx_mmi_criterion: lattices do not cover the corpus");
  struct Part {
    double num = 0.0, den = 0.0;
    long frames = 0;
  };
  auto parts = parallel_map<Part>(corpus.size(), jobs, [&](int i) {
    const auto& frames = corpus.utterances[i].frames;
    Part p;
    p.num = numerator_ll(model, frames, num_pmls[i], kappa, lex, silence);
    p.den = lattice_forward_backward(model, frames, den_pmls[i], kappa, lex,
                                     silence, /*want_stats=*/false)
                .den_log_likelihood;
    p.frames = corpus.utterances[i].num_frames();
    return p;
  });
  CriterionReport rep;
  for (const auto& p : parts) {
    rep.num_ll += p.num;
    rep.den_ll += p.den;
    rep.frame_count += p.frames;
  }
  return rep;
}

CriterionReport exact_mmi_criterion(const AcousticModel& model,
                                    const Corpus& corpus,
                                    const TranscriptionScorer& scorer,
                                    double kappa, int jobs) {
  require(kappa > 0.0, "exact_mmi_criterion: kappa <= 0");
  struct Part {
    double num = 0.0, den = 0.0;
    long frames = 0;
  };
  auto parts = parallel_map<Part>(corpus.size(), jobs, [&](int i) {
    const auto& utt = corpus.utterances[i];
    const int ref = scorer.find(utt.reference);
    require(ref >= 0, "exact_mmi_criterion: reference not enumerable on " +
                          utt.id);
    const auto f = scorer.score(model, utt.frames);
    const auto& lm = scorer.lm_log_probs();
    std::vector<double> scaled(f.size(), kLogZero);
    for (std::size_t w = 0; w < f.size(); ++w)
      if (f[w] != kLogZero) scaled[w] = f[w] / kappa + lm[w];
    if (scaled[ref] == kLogZero)
      throw ReferenceStarvedError("exact_mmi_criterion: reference starved on " +
                                  utt.id);
    Part p;
    p.num = scaled[ref];
    p.den = log_sum_exp(scaled);
    p.frames = utt.num_frames();
    return p;
  });
  CriterionReport rep;
  for (const auto& p : parts) {
    rep.num_ll += p.num;
    rep.den_ll += p.den;
    rep.frame_count += p.frames;
  }
  return rep;
}

int phone_accuracy(const Transcription& hyp, const Transcription& ref,
                   const Lexicon& lex) {
  const auto hp = lex.phones_of(hyp);
  const auto rp = lex.phones_of(ref);
  const EditCounts c = edit_distance(hp, rp);
  return static_cast<int>(rp.size()) - c.total();
}

double approx_mpe_criterion(const AcousticModel& model, const Corpus& corpus,
                            const std::vector<PhoneMarkedLattice>& den_pmls,
                            double kappa, const Lexicon& lex,
                            SilencePolicy silence, int jobs) {
  require(static_cast<int>(den_pmls.size()) == corpus.size(),
          "approx_mpe_criterion: lattices do not cover the corpus");
  auto parts = parallel_map<double>(corpus.size(), jobs, [&](int i) {
    const auto& utt = corpus.utterances[i];
    const auto& pml = den_pmls[i];
    const auto fb = lattice_forward_backward(model, utt.frames, pml, kappa,
                                             lex, silence, /*want_stats=*/false);
    double acc = 0.0;
    for (std::size_t e = 0; e < pml.entries.size(); ++e)
      if (fb.entry_posteriors[e] > 0.0)
        acc += fb.entry_posteriors[e] *
               phone_accuracy(pml.entries[e].words, utt.reference, lex);
    return acc;
  });
  double total = 0.0;
  for (double p : parts) total += p;
  return total;
}

}  // namespace mmilab
