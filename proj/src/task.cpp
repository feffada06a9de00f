// src/task.cpp
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

#include "mmilab/task.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace mmilab {

void TaskSpec::validate() const {
  require(vocab_size >= 1 && phone_count >= 1 && feature_dim >= 1 &&
              train_utterances >= 1 && test_utterances >= 1,
          "task spec: counts must be >= 1");
  require(phones_per_word_min >= 1 &&
              phones_per_word_max >= phones_per_word_min,
          "task spec: bad phones-per-word range");
  require(utterance_words_min >= 1 &&
              utterance_words_max >= utterance_words_min,
          "task spec: bad utterance length range");
  require(mean_separation >= 0.0, "task spec: negative mean separation");
  require(frames_per_state >= 1.0, "task spec: frames_per_state < 1");
  require(silence_prob > 0.0 && silence_prob < 1.0,
          "task spec: silence_prob outside (0,1)");
  require(bigram_zero_fraction >= 0.0 && bigram_zero_fraction < 1.0,
          "task spec: bigram_zero_fraction outside [0,1)");
  require(variance_floor_fraction > 0.0 && variance_floor_fraction < 1.0,
          "task spec: variance floor fraction outside (0,1)");
}

long Corpus::total_frames() const {
  long n = 0;
  for (const auto& u : utterances) n += u.num_frames();
  return n;
}

std::vector<double> variance_floor_from_corpus(const Corpus& corpus,
                                               double fraction) {
  require(fraction > 0.0 && fraction < 1.0,
          "variance_floor_from_corpus: fraction outside (0,1)");
  const long n = corpus.total_frames();
  require(n >= 2, "variance_floor_from_corpus: needs >= 2 frames");
  const int d = static_cast<int>(corpus.utterances.front().frames.front().size());
  std::vector<double> sum(d, 0.0), sq(d, 0.0);
  for (const auto& u : corpus.utterances)
    for (const auto& y : u.frames)
      for (int i = 0; i < d; ++i) {
        sum[i] += y[i];
        sq[i] += y[i] * y[i];
      }
  std::vector<double> floor(d);
  for (int i = 0; i < d; ++i) {
    const double mean = sum[i] / n;
    floor[i] = fraction * (sq[i] / n - mean * mean);
  }
  return floor;
}

namespace {

std::mt19937_64 sub_rng(std::uint64_t seed, const char* tag, int index) {
  std::uint64_t h = fnv1a64(tag, std::string(tag).size(), seed);
  h = hash_combine(h, static_cast<std::uint64_t>(index));
  return std::mt19937_64(h);
}

std::vector<double> random_simplex(std::mt19937_64& rng, int n) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> v(n);
  double s = 0.0;
  for (double& x : v) s += (x = ex(rng));
  for (double& x : v) x /= s;
  return v;
}

Lexicon make_lexicon(const TaskSpec& spec, std::mt19937_64& rng) {
  Lexicon lex;
  std::uniform_int_distribution<int> len(spec.phones_per_word_min,
                                         spec.phones_per_word_max);
  std::uniform_int_distribution<int> phone(0, spec.phone_count - 1);
  std::set<std::vector<int>> seen;
  for (int w = 0; w < spec.vocab_size; ++w) {
    std::vector<int> pron;
    for (int attempt = 0; attempt < 10000; ++attempt) {
      pron.resize(len(rng));
      for (int& p : pron) p = phone(rng);
      if (seen.insert(pron).second) break;
      pron.clear();
    }
    require(!pron.empty(),
            "generate_task: cannot draw distinct pronunciations; enlarge the "
            "phone set or word lengths");
    lex.words.push_back("w" + std::to_string(w));
    lex.entries.push_back(pron);
  }
  return lex;
}

BigramLm make_lm(const TaskSpec& spec, std::mt19937_64& rng,
                 bool structural_zeros) {
  const int v = spec.vocab_size;
  BigramLm lm;
  lm.vocab = v;
  auto to_log = [](const std::vector<double>& p) {
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
      out[i] = p[i] > 0.0 ? std::log(p[i]) : kLogZero;
    return out;
  };
  lm.log_begin = to_log(random_simplex(rng, v));
  std::uniform_real_distribution<double> end_mass(0.25, 0.40);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  lm.log_trans.resize(v);
  lm.log_end.resize(v);
  for (int w = 0; w < v; ++w) {
    std::vector<double> row = random_simplex(rng, v);
    if (structural_zeros && v > 1) {
      // Drop some successors outright; keep at least one alive.
      std::vector<int> alive;
      for (int j = 0; j < v; ++j)
        if (unit(rng) >= spec.bigram_zero_fraction) alive.push_back(j);
      if (alive.empty()) alive.push_back(w % v);
      double kept = 0.0;
      for (int j = 0; j < v; ++j) {
        if (std::find(alive.begin(), alive.end(), j) == alive.end())
          row[j] = 0.0;
        kept += row[j];
      }
      for (double& x : row) x /= kept;
    }
    const double e = end_mass(rng);
    for (double& x : row) x *= (1.0 - e);
    lm.log_trans[w] = to_log(row);
    lm.log_end[w] = std::log(e);
  }
  lm.validate();
  return lm;
}

AcousticModel make_true_model(const TaskSpec& spec, std::mt19937_64& rng) {
  AcousticModel m;
  m.dim = spec.feature_dim;
  for (int p = 0; p < spec.phone_count; ++p)
    m.phones.push_back("p" + std::to_string(p));
  m.phones.push_back("sil");
  m.silence_phone = spec.phone_count;
  m.log_silence = std::log(spec.silence_prob);
  m.log_no_silence = std::log(1.0 - spec.silence_prob);

  const double stay = 1.0 - 1.0 / spec.frames_per_state;
  const double log_self = stay > 0.0 ? std::log(stay) : kLogZero;
  const double log_next = std::log(1.0 - stay);
  auto make_topo = [&](int n_states) {
    PhoneTopology topo;
    for (int s = 0; s < n_states; ++s) {
      topo.state_ids.push_back(m.num_states());
      m.states.push_back(DiagonalGaussian{
          std::vector<double>(m.dim, 0.0), std::vector<double>(m.dim, 1.0)});
      topo.log_self.push_back(log_self);
      topo.log_next.push_back(log_next);
    }
    return topo;
  };
  for (int p = 0; p < spec.phone_count; ++p) m.topologies.push_back(make_topo(3));
  m.topologies.push_back(make_topo(1));  // silence

  // Place state means so the average pairwise distance is mean_separation
  // (in units of the unit true sigma): sample, center, rescale exactly.
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto& g : m.states)
    for (double& x : g.mean) x = gauss(rng);
  std::vector<double> centroid(m.dim, 0.0);
  for (const auto& g : m.states)
    for (int i = 0; i < m.dim; ++i) centroid[i] += g.mean[i];
  for (double& c : centroid) c /= m.num_states();
  for (auto& g : m.states)
    for (int i = 0; i < m.dim; ++i) g.mean[i] -= centroid[i];
  double mean_dist = 0.0;
  int pairs = 0;
  for (int a = 0; a < m.num_states(); ++a)
    for (int b = a + 1; b < m.num_states(); ++b) {
      double d2 = 0.0;
      for (int i = 0; i < m.dim; ++i) {
        const double d = m.states[a].mean[i] - m.states[b].mean[i];
        d2 += d * d;
      }
      mean_dist += std::sqrt(d2);
      ++pairs;
    }
  mean_dist = pairs > 0 ? mean_dist / pairs : 0.0;
  const double scale =
      mean_dist > 0.0 ? spec.mean_separation / mean_dist : 0.0;
  for (auto& g : m.states)
    for (double& x : g.mean) x *= scale;

  m.floor.assign(m.dim, 1e-6);  // provisional; replaced from the corpus
  return m;
}

Transcription sample_reference(const TaskSpec& spec, const BigramLm& lm,
                               std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::vector<int> words;
    int prev = -1;
    while (static_cast<int>(words.size()) <= spec.utterance_words_max) {
      double u = unit(rng);
      if (prev >= 0) {
        const double end_p = std::exp(lm.log_end[prev]);
        if (u < end_p) break;
        u = (u - end_p) / (1.0 - end_p);
      }
      double acc = 0.0;
      int chosen = -1;
      for (int w = 0; w < lm.vocab; ++w) {
        const double lp =
            prev < 0 ? lm.log_begin[w] : lm.log_trans[prev][w];
        if (lp == kLogZero) continue;
        const double p =
            prev < 0 ? std::exp(lp) : std::exp(lp) / (1.0 - std::exp(lm.log_end[prev]));
        acc += p;
        if (u < acc) {
          chosen = w;
          break;
        }
      }
      if (chosen < 0) chosen = lm.vocab - 1;  // guard roundoff at acc ~ 1
      words.push_back(chosen);
      prev = chosen;
    }
    const int n = static_cast<int>(words.size());
    if (n >= spec.utterance_words_min && n <= spec.utterance_words_max)
      return Transcription{words};
  }
  throw ContractError("generate_task: cannot sample reference in range");
}

Utterance sample_utterance(const TaskSpec& spec, const Lexicon& lex,
                           const BigramLm& lm, const AcousticModel& truth,
                           const char* tag, int index) {
  auto rng = sub_rng(spec.seed, tag, index);
  Utterance utt;
  utt.id = std::string(tag) + "-" + std::to_string(index);
  utt.reference = sample_reference(spec, lm, rng);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<int> units;  // phone ids incl. sampled silences
  auto maybe_silence = [&]() {
    if (unit(rng) < spec.silence_prob) units.push_back(truth.silence_phone);
  };
  for (int i = 0; i < utt.reference.length(); ++i) {
    if ((i == 0 && spec.silence != SilencePolicy::kNone) ||
        (i > 0 && spec.silence == SilencePolicy::kOptionalEverywhere))
      maybe_silence();
    const auto& pron = lex.entries[utt.reference.words[i]];
    units.insert(units.end(), pron.begin(), pron.end());
  }
  if (spec.silence != SilencePolicy::kNone) maybe_silence();

  const double stay = 1.0 - 1.0 / spec.frames_per_state;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int phone : units) {
    const auto& topo = truth.topologies[phone];
    for (int s = 0; s < topo.num_states(); ++s) {
      int dur = 1;
      while (stay > 0.0 && unit(rng) < stay) ++dur;
      const auto& g = truth.states[topo.state_ids[s]];
      for (int t = 0; t < dur; ++t) {
        FeatureVector y(truth.dim);
        for (int i = 0; i < truth.dim; ++i)
          y[i] = g.mean[i] + std::sqrt(g.var[i]) * gauss(rng);
        utt.frames.push_back(std::move(y));
        utt.gen_states.push_back(topo.state_ids[s]);
      }
    }
  }
  return utt;
}

}  // namespace

TaskBundle generate_task(const TaskSpec& spec) {
  spec.validate();
  TaskBundle bundle;
  bundle.spec = spec;

  auto rng_lex = sub_rng(spec.seed, "lexicon", 0);
  bundle.lexicon = make_lexicon(spec, rng_lex);
  auto rng_lm = sub_rng(spec.seed, "train-lm", 0);
  bundle.train_lm = make_lm(spec, rng_lm, /*structural_zeros=*/true);
  auto rng_lm2 = sub_rng(spec.seed, "test-lm", 0);
  bundle.test_lm = make_lm(spec, rng_lm2, /*structural_zeros=*/false);
  auto rng_model = sub_rng(spec.seed, "true-model", 0);
  bundle.true_model = make_true_model(spec, rng_model);

  for (int i = 0; i < spec.train_utterances; ++i)
    bundle.train.utterances.push_back(sample_utterance(
        spec, bundle.lexicon, bundle.train_lm, bundle.true_model, "train", i));
  for (int i = 0; i < spec.test_utterances; ++i)
    bundle.test.utterances.push_back(sample_utterance(
        spec, bundle.lexicon, bundle.test_lm, bundle.true_model, "test", i));

  bundle.true_model.floor =
      variance_floor_from_corpus(bundle.train, spec.variance_floor_fraction);
  bundle.true_model.validate();
  return bundle;
}

}  // namespace mmilab
