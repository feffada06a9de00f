// include/mmilab/training.hpp
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

#ifndef MMILAB_TRAINING_HPP
#define MMILAB_TRAINING_HPP

#include <map>
#include <optional>
#include <vector>

#include "mmilab/criteria.hpp"
#include "mmilab/lattice.hpp"
#include "mmilab/stats.hpp"
#include "mmilab/task.hpp"

namespace mmilab {

struct EbwConfig {
  double E = 1.0;
  std::vector<double> floor;  // empty = use the model's own floor
  bool d_min_doubling = true;
  double kappa = 4.0;

  void validate() const {
    require(E >= 0.0, "ebw config: E < 0");
    require(kappa > 0.0, "ebw config: kappa <= 0");
  }
};

// Lattice refresh policy across EBW iterations.
enum class Regime { kFixedLattices, kRegenerateAll, kRegeneratePhoneMarks };

const char* to_string(Regime r);
Regime regime_from_string(const std::string& s);

enum class Objective { kMmi, kMpe };

struct IterationRow {
  int iter = 0;
  CriterionReport approx;
  std::optional<CriterionReport> exact;
  double param_dist = 0.0;
  int floored_count = 0;
  std::optional<double> train_wer_a;
  std::optional<double> train_wer_b_or_c;
  std::optional<double> test_wer;
  std::optional<double> mpe_criterion;
  double wall_seconds = 0.0;
};

struct IterationLog {
  std::vector<IterationRow> rows;
};

// Which diagnostics run at which iterations; 0 disables a column.
struct EvalPlan {
  int train_a_every = 1;
  int train_bc_every = 1;
  int test_every = 1;
  int exact_every = 10;
  bool log_mpe = false;
};

// Flat start: every state carries the corpus global mean and (floored)
// variance; transition structure is copied from the architecture.
AcousticModel flat_start(const AcousticModel& architecture,
                         const Corpus& corpus);

struct MlAccumulation {
  SufficientStats stats;
  double log_likelihood = 0.0;  // corpus sum at the accumulating model
  long frame_count = 0;
  int skipped_utterances = 0;
};

// Standard Baum-Welch E-step over utterance graphs, acoustic scale 1.
MlAccumulation ml_accumulate(const AcousticModel& model, const Corpus& corpus,
                             const Lexicon& lex, SilencePolicy silence,
                             int jobs = 1);

// M-step: mu = m1/gamma, var = m2/gamma - mu^2, floored; zero-occupancy
// states keep their previous parameters.
AcousticModel ml_update(const AcousticModel& model,
                        const SufficientStats& stats,
                        const std::vector<double>& floor);

struct MmiAccumulation {
  SufficientStats num;
  SufficientStats den;
  double num_ll = 0.0;
  double den_ll = 0.0;
  long frame_count = 0;

  CriterionReport report() const {
    return CriterionReport{num_ll, den_ll, frame_count};
  }
};

// Numerator stats from the reference entries, denominator stats from the
// entry-posterior-weighted phone-arc forward-backward.
MmiAccumulation mmi_accumulate(const AcousticModel& model,
                               const Corpus& corpus,
                               const std::vector<PhoneMarkedLattice>& num_pmls,
                               const std::vector<PhoneMarkedLattice>& den_pmls,
                               double kappa, const Lexicon& lex,
                               SilencePolicy silence, int jobs = 1);

// Extended Baum-Welch update with per-Gaussian smoothing
// D = max(E * gamma_den, 2 * D_min), D_min the smallest D keeping every
// new variance (and the update denominator) positive.
AcousticModel ebw_update(const AcousticModel& model,
                         const SufficientStats& num,
                         const SufficientStats& den, const EbwConfig& cfg);

// MPE flavor: entry weights posterior * (A(v,w) - posterior-averaged A);
// positive mass accumulates as numerator-type stats, negative as
// denominator-type, then the EBW update applies.
AcousticModel mpe_ebw_update(const AcousticModel& model, const Corpus& corpus,
                             const std::vector<PhoneMarkedLattice>& den_pmls,
                             double kappa, const EbwConfig& cfg,
                             const Lexicon& lex, SilencePolicy silence,
                             int jobs = 1);

struct RegimeInputs {
  const TaskBundle* bundle = nullptr;
  AcousticModel mle;
  LatticeConfig lattice;
  EbwConfig ebw;
  EvalPlan plan;
  Objective objective = Objective::kMmi;
  std::vector<int> snapshot_iters;
  int jobs = 1;
  // Optional pre-built mle lattices so sweeps can share them.
  const std::vector<WordLattice>* initial_word_lattices = nullptr;
  const std::vector<PhoneMarkedLattice>* initial_pmls = nullptr;
};

struct RegimeResult {
  IterationLog log;
  AcousticModel final_model;
  std::map<int, AcousticModel> snapshots;
  std::vector<PhoneMarkedLattice> initial_pmls;  // the mle lattices
};

// Runs `iters` EBW iterations from the mle under the given lattice-refresh
// regime, logging one row per iteration (row 0 is the mle itself).
RegimeResult run_regime(Regime regime, int iters, const RegimeInputs& in);

// One fixed-lattice run per E, sharing theta_mle and the mle lattices.
std::map<double, IterationLog> e_sweep(const std::vector<double>& e_values,
                                       int iters, const RegimeInputs& in);

// Lattice generation + phone marking for a whole corpus at one model.
void build_lattices(const AcousticModel& model, const Corpus& corpus,
                    const TranscriptionScorer& scorer, const Lexicon& lex,
                    const LatticeConfig& cfg, const std::string& tag, int jobs,
                    std::vector<WordLattice>* wls,
                    std::vector<PhoneMarkedLattice>* pmls);

}  // namespace mmilab

#endif  // MMILAB_TRAINING_HPP
