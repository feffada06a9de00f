// src/lattice.cpp
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

#include "mmilab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace mmilab {

namespace {

// Attachment points for extending the trie: (state, accumulated log-prob),
// state -1 meaning the virtual path start.
using Attach = std::vector<std::pair<int, double>>;

}  // namespace

TranscriptionScorer::TranscriptionScorer(const Lexicon& lex,
                                         const AcousticModel& arch,
                                         const BigramLm& lm, int max_len,
                                         SilencePolicy silence,
                                         std::size_t cap) {
  require(max_len >= 1, "transcription scorer: max_len < 1");
  require(lex.size() == lm.vocab, "transcription scorer: lexicon/LM size");
  num_gauss_ = arch.num_states();

  auto connect = [&](int from, double lp, int to) {
    if (from < 0)
      init_.emplace_back(to, lp);
    else
      arcs_.push_back(Arc{from, to, lp});
  };
  // Adds one phone chain; returns (first, last) state ids.
  auto add_chain = [&](int phone) {
    const auto& topo = arch.topologies[phone];
    int first = -1, prev = -1;
    for (int s = 0; s < topo.num_states(); ++s) {
      const int cur = static_cast<int>(states_.size());
      states_.push_back(State{topo.state_ids[s], topo.log_self[s]});
      if (s == 0)
        first = cur;
      else
        arcs_.push_back(Arc{prev, cur, topo.log_next[s - 1]});
      prev = cur;
    }
    return std::make_pair(first, prev);
  };
  auto exit_lp = [&](int phone) {
    return arch.topologies[phone].log_next.back();
  };
  // Optional-silence junction: weights the pass-through branch and threads
  // a silence chain reachable from every attachment point.
  auto junction = [&](const Attach& in) {
    if (arch.silence_phone < 0) return in;
    Attach out;
    for (const auto& [s, lp] : in)
      out.emplace_back(s, lp + arch.log_no_silence);
    auto [sf, sl] = add_chain(arch.silence_phone);
    for (const auto& [s, lp] : in) connect(s, lp + arch.log_silence, sf);
    out.emplace_back(sl, exit_lp(arch.silence_phone));
    return out;
  };
  auto add_word = [&](int word, const Attach& in) {
    const auto& pron = lex.entries[word];
    int last = -1;
    for (std::size_t p = 0; p < pron.size(); ++p) {
      auto [first, l] = add_chain(pron[p]);
      if (p == 0)
        for (const auto& [s, lp] : in) connect(s, lp, first);
      else
        arcs_.push_back(Arc{last, first, exit_lp(pron[p - 1])});
      last = l;
    }
    return Attach{{last, exit_lp(pron.back())}};
  };

  std::vector<int> prefix;
  auto dfs = [&](auto&& self, const Attach& attach, double chain) -> void {
    for (int w = 0; w < lm.vocab; ++w) {
      const double step =
          prefix.empty() ? lm.log_begin[w] : lm.log_trans[prefix.back()][w];
      if (step == kLogZero) continue;
      Attach in = attach;
      if (!prefix.empty() && silence == SilencePolicy::kOptionalEverywhere)
        in = junction(in);
      Attach out = add_word(w, in);
      prefix.push_back(w);
      if (lm.log_end[w] != kLogZero) {
        if (trans_.size() >= cap)
          throw ConfigError("transcription scorer: enumeration cap exceeded");
        trans_.push_back(Transcription{prefix});
        lm_logp_.push_back(chain + step + lm.log_end[w]);
        std::vector<Readout> ro;
        if (silence != SilencePolicy::kNone && arch.silence_phone >= 0) {
          ro.push_back(
              Readout{out[0].first, out[0].second + arch.log_no_silence});
          auto [sf, sl] = add_chain(arch.silence_phone);
          connect(out[0].first, out[0].second + arch.log_silence, sf);
          ro.push_back(Readout{sl, exit_lp(arch.silence_phone)});
        } else {
          ro.push_back(Readout{out[0].first, out[0].second});
        }
        readouts_.push_back(std::move(ro));
      }
      if (static_cast<int>(prefix.size()) < max_len) self(self, out, chain + step);
      prefix.pop_back();
    }
  };
  Attach root{{-1, 0.0}};
  if (silence != SilencePolicy::kNone) root = junction(root);
  dfs(dfs, root, 0.0);
}

int TranscriptionScorer::find(const Transcription& t) const {
  auto it = std::lower_bound(trans_.begin(), trans_.end(), t);
  if (it == trans_.end() || !(*it == t)) return -1;
  return static_cast<int>(it - trans_.begin());
}

std::vector<double> TranscriptionScorer::score(const AcousticModel& model,
                                               const FrameSequence& frames) const {
  require(model.num_states() == num_gauss_, "transcription scorer: model arch");
  require(!frames.empty(), "transcription scorer: no frames");
  const int n = static_cast<int>(frames.size());
  const int ns = static_cast<int>(states_.size());

  std::vector<double> dens(num_gauss_);
  std::vector<double> prev(ns, kLogZero), cur(ns, kLogZero);
  for (int t = 0; t < n; ++t) {
    for (int g = 0; g < num_gauss_; ++g)
      dens[g] = log_gaussian_density(model.states[g], frames[t]);
    if (t == 0) {
      std::fill(cur.begin(), cur.end(), kLogZero);
      for (const auto& [s, lp] : init_) cur[s] = log_add(cur[s], lp);
    } else {
      for (int v = 0; v < ns; ++v)
        cur[v] = prev[v] == kLogZero ? kLogZero : prev[v] + states_[v].log_self;
      for (const auto& a : arcs_)
        if (prev[a.src] != kLogZero)
          cur[a.dst] = log_add(cur[a.dst], prev[a.src] + a.log_prob);
    }
    for (int v = 0; v < ns; ++v)
      if (cur[v] != kLogZero) cur[v] += dens[states_[v].gauss];
    std::swap(prev, cur);
  }
  std::vector<double> out(trans_.size(), kLogZero);
  for (std::size_t i = 0; i < trans_.size(); ++i) {
    double acc = kLogZero;
    for (const auto& ro : readouts_[i])
      if (prev[ro.state] != kLogZero)
        acc = log_add(acc, prev[ro.state] + ro.log_prob);
    out[i] = acc;
  }
  return out;
}

WordLattice generate_word_lattice(const AcousticModel& model,
                                  const TranscriptionScorer& scorer,
                                  const Utterance& utt,
                                  const LatticeConfig& cfg,
                                  const std::string& model_tag) {
  cfg.validate();
  const int ref = scorer.find(utt.reference);
  require(ref >= 0, "generate_word_lattice: reference not enumerable");

  const auto f = scorer.score(model, utt.frames);
  const auto& lm = scorer.lm_log_probs();
  std::vector<double> scaled(f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    scaled[i] = f[i] == kLogZero ? kLogZero : f[i] / cfg.kappa + lm[i];
  const double den = log_sum_exp(scaled);
  if (den == kLogZero)
    throw ReferenceStarvedError("generate_word_lattice: nothing aligns on " +
                                utt.id);

  WordLattice wl;
  wl.utterance_id = utt.id;
  wl.model_tag = model_tag;
  wl.epsilon = cfg.epsilon;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const bool is_ref = static_cast<int>(i) == ref;
    const double post =
        scaled[i] == kLogZero ? 0.0 : std::exp(scaled[i] - den);
    if (post < cfg.epsilon && !is_ref) continue;
    if (is_ref) wl.reference_index = static_cast<int>(wl.entries.size());
    wl.entries.push_back(
        WordLattice::Entry{scorer.transcriptions()[i], f[i], lm[i]});
  }
  return wl;
}

WordLattice generate_word_lattice(const AcousticModel& model,
                                  const Lexicon& lex, const BigramLm& lm,
                                  const Utterance& utt,
                                  const LatticeConfig& cfg,
                                  const std::string& model_tag) {
  TranscriptionScorer scorer(lex, model, lm, cfg.max_len, cfg.silence,
                             cfg.enumeration_cap);
  return generate_word_lattice(model, scorer, utt, cfg, model_tag);
}

PhoneMarkedLattice phone_mark(const WordLattice& wl, const AcousticModel& model,
                              const Lexicon& lex, const FrameSequence& frames,
                              SilencePolicy silence) {
  PhoneMarkedLattice pml;
  pml.utterance_id = wl.utterance_id;
  pml.num_frames = static_cast<int>(frames.size());
  pml.model_tag = wl.model_tag;
  for (std::size_t e = 0; e < wl.entries.size(); ++e) {
    const auto& entry = wl.entries[e];
    const bool is_ref = static_cast<int>(e) == wl.reference_index;
    DecodeGraph g = compile_utterance_graph(lex, model, entry.words, silence);
    ViterbiResult vit;
    try {
      vit = viterbi(model, g, frames, 1.0);
    } catch (const EmptyCompositionError&) {
      if (is_ref)
        throw ReferenceStarvedError("phone_mark: reference unalignable on " +
                                    wl.utterance_id);
      std::cerr << "phone_mark: dropping unalignable entry on "
                << wl.utterance_id << "\n";
      ++pml.dropped_entries;
      continue;
    }
    PhoneMarkedLattice::Entry out;
    out.words = entry.words;
    out.lm_log_score = entry.lm_log_score;
    int cur_unit = -1;
    for (std::size_t t = 0; t < vit.emitting_positions.size(); ++t) {
      const auto& node = g.nodes[vit.path[vit.emitting_positions[t]]];
      if (node.unit != cur_unit) {
        out.arcs.push_back(PhoneArc{g.unit_phone[node.unit],
                                    static_cast<int>(t), static_cast<int>(t),
                                    g.unit_word_pos[node.unit]});
        cur_unit = node.unit;
      }
      out.arcs.back().end = static_cast<int>(t) + 1;
    }
    if (is_ref) pml.reference_index = static_cast<int>(pml.entries.size());
    pml.entries.push_back(std::move(out));
  }
  if (wl.reference_index >= 0)
    require(pml.reference_index >= 0, "phone_mark: reference lost");
  return pml;
}

double anchored_span_score(const AcousticModel& model,
                           const PhoneTopology& topo,
                           const FrameSequence& frames, int begin, int end) {
  return anchored_span_fb(model, topo, frames, begin, end, nullptr);
}

double anchored_span_fb(const AcousticModel& model, const PhoneTopology& topo,
                        const FrameSequence& frames, int begin, int end,
                        std::vector<std::vector<double>>* posteriors) {
  const int S = topo.num_states();
  const int D = end - begin;
  require(begin >= 0 && end <= static_cast<int>(frames.size()) && D >= 1,
          "anchored span: bad range");
  if (D < S) {
    if (posteriors) posteriors->clear();
    return kLogZero;  // no-skip topology cannot fit
  }
  std::vector<std::vector<double>> em(D, std::vector<double>(S));
  for (int t = 0; t < D; ++t)
    for (int s = 0; s < S; ++s)
      em[t][s] =
          log_gaussian_density(model.states[topo.state_ids[s]], frames[begin + t]);

  std::vector<std::vector<double>> a(D, std::vector<double>(S, kLogZero));
  a[0][0] = em[0][0];
  for (int t = 1; t < D; ++t)
    for (int s = 0; s < S; ++s) {
      double acc = a[t - 1][s] == kLogZero ? kLogZero
                                           : a[t - 1][s] + topo.log_self[s];
      if (s > 0 && a[t - 1][s - 1] != kLogZero)
        acc = log_add(acc, a[t - 1][s - 1] + topo.log_next[s - 1]);
      a[t][s] = acc == kLogZero ? kLogZero : acc + em[t][s];
    }
  const double score = a[D - 1][S - 1] + topo.log_next[S - 1];
  if (!posteriors) return score;

  std::vector<std::vector<double>> b(D, std::vector<double>(S, kLogZero));
  b[D - 1][S - 1] = topo.log_next[S - 1];
  for (int t = D - 2; t >= 0; --t)
    for (int s = 0; s < S; ++s) {
      double acc = b[t + 1][s] == kLogZero
                       ? kLogZero
                       : topo.log_self[s] + em[t + 1][s] + b[t + 1][s];
      if (s + 1 < S && b[t + 1][s + 1] != kLogZero)
        acc = log_add(acc, topo.log_next[s] + em[t + 1][s + 1] + b[t + 1][s + 1]);
      b[t][s] = acc;
    }
  posteriors->assign(D, std::vector<double>(S, 0.0));
  for (int t = 0; t < D; ++t)
    for (int s = 0; s < S; ++s)
      if (a[t][s] != kLogZero && b[t][s] != kLogZero)
        (*posteriors)[t][s] = std::exp(a[t][s] + b[t][s] - score);
  return score;
}

namespace {

// Validates an entry's arcs against the lexicon expansion and the silence
// policy, returning the log-probability of the silence branch choices the
// layout implies.
double entry_structure_log_prob(const AcousticModel& model,
                                const PhoneMarkedLattice::Entry& entry,
                                const Lexicon& lex, SilencePolicy silence,
                                int num_frames) {
  const auto& arcs = entry.arcs;
  require(!arcs.empty(), "lattice entry: no arcs");
  require(arcs.front().start == 0 && arcs.back().end == num_frames,
          "lattice entry: arcs do not tile the utterance");
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    require(arcs[i].start < arcs[i].end, "lattice entry: empty arc");
    if (i > 0)
      require(arcs[i].start == arcs[i - 1].end, "lattice entry: arc gap");
  }
  double branch = 0.0;
  std::size_t pos = 0;
  auto slot = [&]() {
    if (model.silence_phone < 0) return;
    if (pos < arcs.size() && arcs[pos].phone == model.silence_phone) {
      branch += model.log_silence;
      ++pos;
    } else {
      branch += model.log_no_silence;
    }
  };
  for (int w = 0; w < entry.words.length(); ++w) {
    if ((w == 0 && silence != SilencePolicy::kNone) ||
        (w > 0 && silence == SilencePolicy::kOptionalEverywhere))
      slot();
    for (int phone : lex.entries[entry.words.words[w]]) {
      require(pos < arcs.size() && arcs[pos].phone == phone,
              "lattice entry: phones do not match the lexicon expansion");
      ++pos;
    }
  }
  if (silence != SilencePolicy::kNone) slot();
  require(pos == arcs.size(), "lattice entry: trailing arcs");
  return branch;
}

}  // namespace

double lattice_acoustic_score(const AcousticModel& model,
                              const FrameSequence& frames,
                              const PhoneMarkedLattice::Entry& entry,
                              const Lexicon& lex, SilencePolicy silence) {
  const double branch = entry_structure_log_prob(
      model, entry, lex, silence, static_cast<int>(frames.size()));
  double acc = branch;
  for (const auto& arc : entry.arcs) {
    const double s = anchored_span_score(model, model.topologies[arc.phone],
                                         frames, arc.start, arc.end);
    if (s == kLogZero) return kLogZero;
    acc += s;
  }
  return acc;
}

LatticeFbResult lattice_forward_backward(const AcousticModel& model,
                                         const FrameSequence& frames,
                                         const PhoneMarkedLattice& pml,
                                         double kappa, const Lexicon& lex,
                                         SilencePolicy silence,
                                         bool want_stats) {
  require(kappa > 0.0, "lattice_forward_backward: kappa <= 0");
  require(pml.num_frames == static_cast<int>(frames.size()),
          "lattice_forward_backward: frame count mismatch");
  require(!pml.entries.empty(), "lattice_forward_backward: no entries");

  LatticeFbResult res;
  std::vector<double> scores(pml.entries.size(), kLogZero);
  for (std::size_t e = 0; e < pml.entries.size(); ++e) {
    const double g =
        lattice_acoustic_score(model, frames, pml.entries[e], lex, silence);
    if (g != kLogZero) scores[e] = g / kappa + pml.entries[e].lm_log_score;
  }
  res.den_log_likelihood = log_sum_exp(scores);
  if (res.den_log_likelihood == kLogZero)
    throw EmptyCompositionError("lattice_forward_backward: empty denominator");

  res.entry_posteriors.resize(pml.entries.size(), 0.0);
  for (std::size_t e = 0; e < pml.entries.size(); ++e)
    if (scores[e] != kLogZero)
      res.entry_posteriors[e] = std::exp(scores[e] - res.den_log_likelihood);

  if (want_stats) {
    res.stats = SufficientStats(model.num_states(), model.dim);
    for (std::size_t e = 0; e < pml.entries.size(); ++e) {
      const double w = res.entry_posteriors[e] / kappa;
      if (w <= 0.0) continue;
      accumulate_entry_stats(model, frames, pml.entries[e], w, &res.stats);
    }
  }
  return res;
}

void accumulate_entry_stats(const AcousticModel& model,
                            const FrameSequence& frames,
                            const PhoneMarkedLattice::Entry& entry,
                            double weight, SufficientStats* stats) {
  std::vector<std::vector<double>> post;
  for (const auto& arc : entry.arcs) {
    const auto& topo = model.topologies[arc.phone];
    anchored_span_fb(model, topo, frames, arc.start, arc.end, &post);
    for (int t = 0; t < arc.end - arc.start; ++t)
      for (int s = 0; s < topo.num_states(); ++s)
        if (post[t][s] > 0.0)
          stats->add_frame(topo.state_ids[s], weight * post[t][s],
                           frames[arc.start + t]);
  }
}

}  // namespace mmilab
