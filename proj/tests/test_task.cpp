// tests/test_task.cpp
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

#include <doctest.h>

#include <cmath>
#include <random>

#include "mmilab/lattice.hpp"
#include "mmilab/task.hpp"
#include "mmilab/wer.hpp"
#include "oracle_helpers.hpp"

using namespace mmilab;
using namespace mmilab::testing;

namespace {

TaskSpec small_spec() {
  TaskSpec s;
  s.vocab_size = 4;
  s.phone_count = 4;
  s.train_utterances = 20;
  s.test_utterances = 5;
  s.seed = 7;
  return s;
}

}  // namespace

TEST_CASE("generate_task is deterministic in the seed") {
  auto a = generate_task(small_spec());
  auto b = generate_task(small_spec());
  CHECK(a.lexicon.entries == b.lexicon.entries);
  CHECK(a.train_lm.log_begin == b.train_lm.log_begin);
  CHECK(a.train_lm.log_trans == b.train_lm.log_trans);
  REQUIRE(a.train.size() == b.train.size());
  for (int i = 0; i < a.train.size(); ++i) {
    CHECK(a.train.utterances[i].reference == b.train.utterances[i].reference);
    CHECK(a.train.utterances[i].frames == b.train.utterances[i].frames);
  }
  for (std::size_t s = 0; s < a.true_model.states.size(); ++s)
    CHECK(a.true_model.states[s].mean == b.true_model.states[s].mean);

  auto spec2 = small_spec();
  spec2.seed = 8;
  auto c = generate_task(spec2);
  CHECK(a.train.utterances[0].frames != c.train.utterances[0].frames);
}

TEST_CASE("zero mean separation collapses every state") {
  auto spec = small_spec();
  spec.mean_separation = 0.0;
  auto bundle = generate_task(spec);
  for (const auto& g : bundle.true_model.states)
    for (double m : g.mean) CHECK(m == 0.0);
}

TEST_CASE("mean separation calibrates the average pairwise distance") {
  auto spec = small_spec();
  spec.mean_separation = 2.5;
  auto bundle = generate_task(spec);
  const auto& states = bundle.true_model.states;
  double dist = 0.0;
  int pairs = 0;
  for (std::size_t a = 0; a < states.size(); ++a)
    for (std::size_t b = a + 1; b < states.size(); ++b) {
      double d2 = 0.0;
      for (int i = 0; i < bundle.true_model.dim; ++i) {
        const double d = states[a].mean[i] - states[b].mean[i];
        d2 += d * d;
      }
      dist += std::sqrt(d2);
      ++pairs;
    }
  CHECK(dist / pairs == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("corpus variance obeys the law of total variance") {
  TaskSpec spec;
  spec.vocab_size = 8;
  spec.phone_count = 5;
  spec.feature_dim = 4;
  spec.seed = 7;
  spec.train_utterances = 300;  // ~1e4 frames
  spec.test_utterances = 1;
  auto bundle = generate_task(spec);
  REQUIRE(bundle.train.total_frames() >= 10000);

  const int d = spec.feature_dim;
  // Oracle: per dimension, E[Var] + Var[mean] under the realized state
  // visit counts, with the true (unit) state variances.
  std::vector<double> sum(d, 0.0), sq(d, 0.0);
  std::vector<double> mean_sum(d, 0.0), mean_sq(d, 0.0);
  long n = 0;
  for (const auto& u : bundle.train.utterances) {
    REQUIRE(u.gen_states.size() == u.frames.size());
    for (std::size_t t = 0; t < u.frames.size(); ++t) {
      const auto& mu = bundle.true_model.states[u.gen_states[t]].mean;
      for (int i = 0; i < d; ++i) {
        sum[i] += u.frames[t][i];
        sq[i] += u.frames[t][i] * u.frames[t][i];
        mean_sum[i] += mu[i];
        mean_sq[i] += mu[i] * mu[i];
      }
      ++n;
    }
  }
  for (int i = 0; i < d; ++i) {
    const double var = sq[i] / n - (sum[i] / n) * (sum[i] / n);
    const double predicted =
        1.0 + (mean_sq[i] / n - (mean_sum[i] / n) * (mean_sum[i] / n));
    CHECK(var == doctest::Approx(predicted).epsilon(0.05));
  }
}

TEST_CASE("variance_floor_from_corpus is the stated fraction") {
  Corpus c;
  Utterance u;
  u.id = "u0";
  u.reference = Transcription{{0}};
  u.frames = {{-2.0, -1.0}, {2.0, 1.0}, {-2.0, -1.0}, {2.0, 1.0}};
  c.utterances.push_back(u);
  auto floor = variance_floor_from_corpus(c, 0.01);
  REQUIRE(floor.size() == 2);
  CHECK(floor[0] == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(floor[1] == doctest::Approx(0.01).epsilon(1e-12));

  CHECK_THROWS_AS(variance_floor_from_corpus(c, 1.0), ContractError);
  CHECK_THROWS_AS(variance_floor_from_corpus(c, 0.0), ContractError);
  Corpus single;
  single.utterances.push_back(
      Utterance{"u1", {{1.0, 1.0}}, Transcription{{0}}, {}});
  CHECK_THROWS_AS(variance_floor_from_corpus(single, 0.5), ContractError);
}

TEST_CASE("generated floor matches an independent variance computation") {
  auto bundle = generate_task(small_spec());
  const int d = bundle.spec.feature_dim;
  std::vector<double> sum(d, 0.0), sq(d, 0.0);
  long n = 0;
  for (const auto& u : bundle.train.utterances)
    for (const auto& y : u.frames) {
      for (int i = 0; i < d; ++i) {
        sum[i] += y[i];
        sq[i] += y[i] * y[i];
      }
      ++n;
    }
  for (int i = 0; i < d; ++i) {
    const double var = sq[i] / n - (sum[i] / n) * (sum[i] / n);
    CHECK(bundle.true_model.floor[i] ==
          doctest::Approx(0.01 * var).epsilon(1e-9));
  }
}

TEST_CASE("references stay inside the configured length band") {
  auto bundle = generate_task(small_spec());
  for (const auto& u : bundle.train.utterances) {
    CHECK(u.reference.length() >= bundle.spec.utterance_words_min);
    CHECK(u.reference.length() <= bundle.spec.utterance_words_max);
    CHECK(lm_log_prob(bundle.train_lm, u.reference) > kLogZero);
  }
  for (const auto& u : bundle.test.utterances)
    CHECK(lm_log_prob(bundle.test_lm, u.reference) > kLogZero);
}

TEST_CASE("true model beats mean-permuted corruptions at decoding") {
  auto spec = small_spec();
  spec.train_utterances = 30;
  spec.mean_separation = 2.0;
  auto bundle = generate_task(spec);
  TranscriptionScorer scorer(bundle.lexicon, bundle.true_model,
                             bundle.train_lm, bundle.spec.utterance_words_max,
                             bundle.spec.silence);
  const double kappa = 4.0;
  const double true_wer =
      decode_method_a(bundle.true_model, bundle.train, scorer, kappa)
          .report.wer();

  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 10; ++trial) {
    AcousticModel corrupted = bundle.true_model;
    std::vector<int> perm(corrupted.num_states());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int s = 0; s < corrupted.num_states(); ++s)
      corrupted.states[s].mean = bundle.true_model.states[perm[s]].mean;
    const double perm_wer =
        decode_method_a(corrupted, bundle.train, scorer, kappa).report.wer();
    CHECK(true_wer < perm_wer);
  }
}
