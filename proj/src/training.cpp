// src/training.cpp
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

#include "mmilab/training.hpp"

#include <chrono>
#include <cmath>
#include <iostream>

#include "mmilab/parallel.hpp"
#include "mmilab/wer.hpp"

namespace mmilab {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::kFixedLattices: return "fixed";
    case Regime::kRegenerateAll: return "regenerate-all";
    case Regime::kRegeneratePhoneMarks: return "regenerate-phone-marks";
  }
  return "?";
}

Regime regime_from_string(const std::string& s) {
  if (s == "fixed") return Regime::kFixedLattices;
  if (s == "regenerate-all") return Regime::kRegenerateAll;
  if (s == "regenerate-phone-marks") return Regime::kRegeneratePhoneMarks;
  throw ConfigError("unknown regime: " + s);
}

AcousticModel flat_start(const AcousticModel& architecture,
                         const Corpus& corpus) {
  const long n = corpus.total_frames();
  require(n >= 2, "flat_start: needs >= 2 frames");
  AcousticModel m = architecture;
  std::vector<double> sum(m.dim, 0.0), sq(m.dim, 0.0);
  for (const auto& u : corpus.utterances)
    for (const auto& y : u.frames)
      for (int i = 0; i < m.dim; ++i) {
        sum[i] += y[i];
        sq[i] += y[i] * y[i];
      }
  DiagonalGaussian g;
  g.mean.resize(m.dim);
  g.var.resize(m.dim);
  for (int i = 0; i < m.dim; ++i) {
    g.mean[i] = sum[i] / n;
    g.var[i] = std::max(sq[i] / n - g.mean[i] * g.mean[i], m.floor[i]);
  }
  for (auto& s : m.states) s = g;
  return m;
}

MlAccumulation ml_accumulate(const AcousticModel& model, const Corpus& corpus,
                             const Lexicon& lex, SilencePolicy silence,
                             int jobs) {
  struct Part {
    SufficientStats stats;
    double ll = 0.0;
    long frames = 0;
    bool skipped = false;
  };
  auto parts = parallel_map<Part>(corpus.size(), jobs, [&](int i) {
    const auto& utt = corpus.utterances[i];
    Part p;
    p.stats = SufficientStats(model.num_states(), model.dim);
    DecodeGraph g = compile_utterance_graph(lex, model, utt.reference, silence);
    ForwardBackwardResult fb;
    try {
      fb = forward_backward(model, g, utt.frames, 1.0);
    } catch (const EmptyCompositionError&) {
      p.skipped = true;
      return p;
    }
    for (int t = 0; t < utt.num_frames(); ++t)
      for (int v = 0; v < g.num_nodes(); ++v)
        if (fb.posteriors[t][v] > 0.0)
          p.stats.add_frame(g.nodes[v].state_id, fb.posteriors[t][v],
                            utt.frames[t]);
    p.ll = fb.total_log_likelihood;
    p.frames = utt.num_frames();
    return p;
  });
  MlAccumulation acc;
  acc.stats = SufficientStats(model.num_states(), model.dim);
  for (const auto& p : parts) {
    if (p.skipped) {
      ++acc.skipped_utterances;
      continue;
    }
    acc.stats.add(p.stats);
    acc.log_likelihood += p.ll;
    acc.frame_count += p.frames;
  }
  if (acc.skipped_utterances > 0)
    std::cerr << "ml_accumulate: skipped " << acc.skipped_utterances
              << " unalignable utterance(s)\n";
  return acc;
}

AcousticModel ml_update(const AcousticModel& model,
                        const SufficientStats& stats,
                        const std::vector<double>& floor) {
  AcousticModel out = model;
  for (int s = 0; s < model.num_states(); ++s) {
    const double g = stats.occ[s];
    if (g <= 0.0) continue;
    for (int i = 0; i < model.dim; ++i) {
      const double mu = stats.m1[s][i] / g;
      out.states[s].mean[i] = mu;
      out.states[s].var[i] = std::max(stats.m2[s][i] / g - mu * mu, floor[i]);
    }
  }
  return out;
}

MmiAccumulation mmi_accumulate(const AcousticModel& model,
                               const Corpus& corpus,
                               const std::vector<PhoneMarkedLattice>& num_pmls,
                               const std::vector<PhoneMarkedLattice>& den_pmls,
                               double kappa, const Lexicon& lex,
                               SilencePolicy silence, int jobs) {
  require(static_cast<int>(num_pmls.size()) == corpus.size() &&
              static_cast<int>(den_pmls.size()) == corpus.size(),
          "mmi_accumulate: lattices do not cover the corpus");
  struct Part {
    SufficientStats num, den;
    double num_ll = 0.0, den_ll = 0.0;
    long frames = 0;
  };
  auto parts = parallel_map<Part>(corpus.size(), jobs, [&](int i) {
    const auto& frames = corpus.utterances[i].frames;
    Part p;
    p.num = SufficientStats(model.num_states(), model.dim);
    p.num_ll = numerator_ll(model, frames, num_pmls[i], kappa, lex, silence);
    accumulate_entry_stats(model, frames, num_pmls[i].reference(), 1.0 / kappa,
                           &p.num);
    auto fb = lattice_forward_backward(model, frames, den_pmls[i], kappa, lex,
                                       silence, /*want_stats=*/true);
    p.den = std::move(fb.stats);
    p.den_ll = fb.den_log_likelihood;
    p.frames = corpus.utterances[i].num_frames();
    return p;
  });
  MmiAccumulation acc;
  acc.num = SufficientStats(model.num_states(), model.dim);
  acc.den = SufficientStats(model.num_states(), model.dim);
  for (const auto& p : parts) {
    acc.num.add(p.num);
    acc.den.add(p.den);
    acc.num_ll += p.num_ll;
    acc.den_ll += p.den_ll;
    acc.frame_count += p.frames;
  }
  return acc;
}

AcousticModel ebw_update(const AcousticModel& model,
                         const SufficientStats& num,
                         const SufficientStats& den, const EbwConfig& cfg) {
  cfg.validate();
  const std::vector<double>& floor = cfg.floor.empty() ? model.floor : cfg.floor;
  AcousticModel out = model;
  for (int s = 0; s < model.num_states(); ++s) {
    const double gn = num.occ[s], gd = den.occ[s];
    if (gn == 0.0 && gd == 0.0) continue;
    const double dg = gn - gd;
    const auto& g = model.states[s];

    // Smallest D keeping every new variance component (and the update
    // denominator) positive: largest root of the per-dimension quadratic
    //   (dm2 + D*(var+mu^2))(dg + D) - (dm1 + D*mu)^2 > 0.
    double d_min = std::max(0.0, -dg);
    for (int i = 0; i < model.dim; ++i) {
      const double dm1 = num.m1[s][i] - den.m1[s][i];
      const double dm2 = num.m2[s][i] - den.m2[s][i];
      const double sq = g.var[i] + g.mean[i] * g.mean[i];
      const double a = g.var[i];
      const double b = dm2 + dg * sq - 2.0 * dm1 * g.mean[i];
      const double c = dm2 * dg - dm1 * dm1;
      const double disc = b * b - 4.0 * a * c;
      if (disc > 0.0)
        d_min = std::max(d_min, (-b + std::sqrt(disc)) / (2.0 * a));
    }
    double d = cfg.E * gd;
    if (d_min > 0.0)
      d = std::max(d, cfg.d_min_doubling ? 2.0 * d_min : d_min);
    const double denom = dg + d;
    if (denom <= 0.0) continue;  // no usable update direction

    for (int i = 0; i < model.dim; ++i) {
      const double dm1 = num.m1[s][i] - den.m1[s][i];
      const double dm2 = num.m2[s][i] - den.m2[s][i];
      const double sq = g.var[i] + g.mean[i] * g.mean[i];
      const double mu = (dm1 + d * g.mean[i]) / denom;
      const double var = (dm2 + d * sq) / denom - mu * mu;
      out.states[s].mean[i] = mu;
      out.states[s].var[i] = std::max(var, floor[i]);
    }
  }
  return out;
}

AcousticModel mpe_ebw_update(const AcousticModel& model, const Corpus& corpus,
                             const std::vector<PhoneMarkedLattice>& den_pmls,
                             double kappa, const EbwConfig& cfg,
                             const Lexicon& lex, SilencePolicy silence,
                             int jobs) {
  require(static_cast<int>(den_pmls.size()) == corpus.size(),
          "mpe_ebw_update: lattices do not cover the corpus");
  struct Part {
    SufficientStats num, den;
  };
  auto parts = parallel_map<Part>(corpus.size(), jobs, [&](int i) {
    const auto& utt = corpus.utterances[i];
    const auto& pml = den_pmls[i];
    Part p;
    p.num = SufficientStats(model.num_states(), model.dim);
    p.den = SufficientStats(model.num_states(), model.dim);
    const auto fb = lattice_forward_backward(model, utt.frames, pml, kappa,
                                             lex, silence, /*want_stats=*/false);
    std::vector<double> acc(pml.entries.size());
    double mean_acc = 0.0;
    for (std::size_t e = 0; e < pml.entries.size(); ++e) {
      acc[e] = phone_accuracy(pml.entries[e].words, utt.reference, lex);
      mean_acc += fb.entry_posteriors[e] * acc[e];
    }
    for (std::size_t e = 0; e < pml.entries.size(); ++e) {
      const double w =
          fb.entry_posteriors[e] * (acc[e] - mean_acc) / kappa;
      if (w > 0.0)
        accumulate_entry_stats(model, utt.frames, pml.entries[e], w, &p.num);
      else if (w < 0.0)
        accumulate_entry_stats(model, utt.frames, pml.entries[e], -w, &p.den);
    }
    return p;
  });
  SufficientStats num(model.num_states(), model.dim);
  SufficientStats den(model.num_states(), model.dim);
  for (const auto& p : parts) {
    num.add(p.num);
    den.add(p.den);
  }
  return ebw_update(model, num, den, cfg);
}

void build_lattices(const AcousticModel& model, const Corpus& corpus,
                    const TranscriptionScorer& scorer, const Lexicon& lex,
                    const LatticeConfig& cfg, const std::string& tag, int jobs,
                    std::vector<WordLattice>* wls,
                    std::vector<PhoneMarkedLattice>* pmls) {
  struct Pair {
    WordLattice wl;
    PhoneMarkedLattice pml;
  };
  auto pairs = parallel_map<Pair>(corpus.size(), jobs, [&](int i) {
    const auto& utt = corpus.utterances[i];
    Pair p;
    p.wl = generate_word_lattice(model, scorer, utt, cfg, tag);
    p.pml = phone_mark(p.wl, model, lex, utt.frames, cfg.silence);
    return p;
  });
  if (wls) wls->clear();
  if (pmls) pmls->clear();
  for (auto& p : pairs) {
    if (wls) wls->push_back(std::move(p.wl));
    if (pmls) pmls->push_back(std::move(p.pml));
  }
}

namespace {

bool due(int every, int k, int last) {
  return every > 0 && (k % every == 0 || k == last);
}

std::vector<PhoneMarkedLattice> remark(const std::vector<WordLattice>& wls,
                                       const AcousticModel& model,
                                       const Corpus& corpus, const Lexicon& lex,
                                       SilencePolicy silence, int jobs) {
  return parallel_map<PhoneMarkedLattice>(
      static_cast<int>(wls.size()), jobs, [&](int i) {
        return phone_mark(wls[i], model, lex, corpus.utterances[i].frames,
                          silence);
      });
}

}  // namespace

RegimeResult run_regime(Regime regime, int iters, const RegimeInputs& in) {
  require(in.bundle != nullptr, "run_regime: no task bundle");
  require(iters >= 0, "run_regime: negative iteration count");
  in.lattice.validate();
  in.ebw.validate();
  const auto& b = *in.bundle;
  const double kappa = in.lattice.kappa;
  const SilencePolicy silence = in.lattice.silence;

  TranscriptionScorer train_scorer(b.lexicon, in.mle, b.train_lm,
                                   in.lattice.max_len, silence,
                                   in.lattice.enumeration_cap);
  std::optional<TranscriptionScorer> test_scorer;
  if (in.plan.test_every > 0)
    test_scorer.emplace(b.lexicon, in.mle, b.test_lm, in.lattice.max_len,
                        silence, in.lattice.enumeration_cap);

  std::vector<WordLattice> wls;
  std::vector<PhoneMarkedLattice> pmls;
  if (in.initial_word_lattices && in.initial_pmls) {
    wls = *in.initial_word_lattices;
    pmls = *in.initial_pmls;
  } else {
    build_lattices(in.mle, b.train, train_scorer, b.lexicon, in.lattice, "mle",
                   in.jobs, &wls, &pmls);
  }

  RegimeResult result;
  result.initial_pmls = pmls;
  const std::vector<WordLattice> fixed_wls = wls;          // V_mle
  const std::vector<PhoneMarkedLattice> fixed_pmls = pmls;  // R_mle

  AcousticModel model = in.mle;
  for (int k = 0; k <= iters; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    IterationRow row;
    row.iter = k;
    row.approx = approx_mmi_criterion(model, b.train, pmls, pmls, kappa,
                                      b.lexicon, silence, in.jobs);
    if (due(in.plan.exact_every, k, iters))
      row.exact =
          exact_mmi_criterion(model, b.train, train_scorer, kappa, in.jobs);
    row.param_dist = parameter_distance(model, in.mle);
    row.floored_count = count_floored(model);
    if (due(in.plan.train_a_every, k, iters))
      row.train_wer_a =
          decode_method_a(model, b.train, train_scorer, kappa, in.jobs)
              .report.wer();
    if (due(in.plan.train_bc_every, k, iters)) {
      // Method B rescores the fixed mle lattices; under regenerated marks
      // this is method C by construction (the marks in `pmls` are theta_k's).
      const auto& set =
          regime == Regime::kFixedLattices ? fixed_pmls : pmls;
      row.train_wer_b_or_c =
          rescore_method_b(model, b.train, set, kappa, b.lexicon, silence,
                           in.jobs)
              .report.wer();
    }
    if (due(in.plan.test_every, k, iters))
      row.test_wer =
          decode_method_a(model, b.test, *test_scorer, kappa, in.jobs)
              .report.wer();
    if (in.plan.log_mpe || in.objective == Objective::kMpe)
      row.mpe_criterion = approx_mpe_criterion(model, b.train, pmls, kappa,
                                               b.lexicon, silence, in.jobs);
    for (int snap : in.snapshot_iters)
      if (snap == k) result.snapshots.emplace(k, model);
    row.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    result.log.rows.push_back(std::move(row));
    if (k == iters) break;

    try {
      if (in.objective == Objective::kMmi) {
        auto acc = mmi_accumulate(model, b.train, pmls, pmls, kappa, b.lexicon,
                                  silence, in.jobs);
        model = ebw_update(model, acc.num, acc.den, in.ebw);
      } else {
        model = mpe_ebw_update(model, b.train, pmls, kappa, in.ebw, b.lexicon,
                               silence, in.jobs);
      }
    } catch (const ReferenceStarvedError& e) {
      throw ReferenceStarvedError("iteration " + std::to_string(k + 1) + ": " +
                                  e.what());
    }

    if (regime == Regime::kRegenerateAll) {
      build_lattices(model, b.train, train_scorer, b.lexicon, in.lattice,
                     "iter-" + std::to_string(k + 1), in.jobs, &wls, &pmls);
    } else if (regime == Regime::kRegeneratePhoneMarks) {
      pmls = remark(fixed_wls, model, b.train, b.lexicon, silence, in.jobs);
    }
  }
  result.final_model = model;
  return result;
}

std::map<double, IterationLog> e_sweep(const std::vector<double>& e_values,
                                       int iters, const RegimeInputs& in) {
  require(in.bundle != nullptr, "e_sweep: no task bundle");
  TranscriptionScorer scorer(in.bundle->lexicon, in.mle, in.bundle->train_lm,
                             in.lattice.max_len, in.lattice.silence,
                             in.lattice.enumeration_cap);
  std::vector<WordLattice> wls;
  std::vector<PhoneMarkedLattice> pmls;
  build_lattices(in.mle, in.bundle->train, scorer, in.bundle->lexicon,
                 in.lattice, "mle", in.jobs, &wls, &pmls);
  std::map<double, IterationLog> out;
  for (double e : e_values) {
    RegimeInputs run = in;
    run.ebw.E = e;
    run.initial_word_lattices = &wls;
    run.initial_pmls = &pmls;
    out.emplace(e, run_regime(Regime::kFixedLattices, iters, run).log);
  }
  return out;
}

}  // namespace mmilab
