// include/mmilab/criteria.hpp
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

#ifndef MMILAB_CRITERIA_HPP
#define MMILAB_CRITERIA_HPP

#include <vector>

#include "mmilab/lattice.hpp"
#include "mmilab/lexicon.hpp"
#include "mmilab/task.hpp"

namespace mmilab {

// Corpus-level numerator/denominator log-likelihood sums; the per-frame
// views divide by the same frame count so num - den holds exactly.
struct CriterionReport {
  double num_ll = 0.0;
  double den_ll = 0.0;
  long frame_count = 0;

  double num_ll_per_frame() const { return num_ll / frame_count; }
  double den_ll_per_frame() const { return den_ll / frame_count; }
  double log_mmi_per_frame() const { return (num_ll - den_ll) / frame_count; }
};

// (1/kappa) log g(x | w ; R) + log p(w) for the reference entry. Throws
// ReferenceStarvedError when the restricted alignment has no mass.
double numerator_ll(const AcousticModel& model, const FrameSequence& frames,
                    const PhoneMarkedLattice& pml, double kappa,
                    const Lexicon& lex, SilencePolicy silence);

// Approximate MMI criterion over lattice transcriptions and phone-marked
// state sequences. Numerator entries come from `num_pmls`, denominators
// from `den_pmls` (the same set in every regime of this lab).
CriterionReport approx_mmi_criterion(const AcousticModel& model,
                                     const Corpus& corpus,
                                     const std::vector<PhoneMarkedLattice>& num_pmls,
                                     const std::vector<PhoneMarkedLattice>& den_pmls,
                                     double kappa, const Lexicon& lex,
                                     SilencePolicy silence, int jobs = 1);

// The true criterion at desk scale: denominator summed over every
// enumerable transcription with unrestricted forward scores.
CriterionReport exact_mmi_criterion(const AcousticModel& model,
                                    const Corpus& corpus,
                                    const TranscriptionScorer& scorer,
                                    double kappa, int jobs = 1);

// A(hyp, ref) = |phones(ref)| - levenshtein(phones(hyp), phones(ref)).
// May be negative.
int phone_accuracy(const Transcription& hyp, const Transcription& ref,
                   const Lexicon& lex);

// Posterior-weighted phone accuracy of the lattice entries, summed over
// utterances. Bounded above by the total reference phone count.
double approx_mpe_criterion(const AcousticModel& model, const Corpus& corpus,
                            const std::vector<PhoneMarkedLattice>& den_pmls,
                            double kappa, const Lexicon& lex,
                            SilencePolicy silence, int jobs = 1);

}  // namespace mmilab

#endif  // MMILAB_CRITERIA_HPP
