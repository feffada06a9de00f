// tests/test_lexicon.cpp
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

#include "mmilab/lexicon.hpp"
#include "oracle_helpers.hpp"

using namespace mmilab;
using namespace mmilab::testing;

namespace {

BigramLm uniform_lm(int vocab, double end_prob) {
  BigramLm lm;
  lm.vocab = vocab;
  lm.log_begin.assign(vocab, std::log(1.0 / vocab));
  lm.log_end.assign(vocab, std::log(end_prob));
  lm.log_trans.assign(vocab,
                      std::vector<double>(vocab, std::log((1.0 - end_prob) / vocab)));
  lm.validate();
  return lm;
}

// Binomial coefficient for the stars-and-bars duration count.
long choose(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("lm_log_prob follows the bigram chain") {
  auto lm = uniform_lm(2, 0.4);
  Transcription one{{0}};
  CHECK(lm_log_prob(lm, one) ==
        doctest::Approx(std::log(0.5) + std::log(0.4)).epsilon(1e-12));

  // Structural zero makes the whole transcription impossible.
  lm.log_trans[0][1] = kLogZero;
  CHECK(lm_log_prob(lm, Transcription{{0, 1}}) == kLogZero);

  CHECK_THROWS_AS(lm_log_prob(lm, Transcription{{0, 7}}), ContractError);
  CHECK_THROWS_AS(lm_log_prob(lm, Transcription{{}}), ContractError);
}

TEST_CASE("lm_log_prob matches a hand-multiplied chain") {
  BigramLm lm;
  lm.vocab = 3;
  lm.log_begin = {std::log(0.5), std::log(0.3), std::log(0.2)};
  lm.log_end = {std::log(0.25), std::log(0.5), std::log(0.4)};
  lm.log_trans = {
      {std::log(0.25), std::log(0.25), std::log(0.25)},
      {std::log(0.1), std::log(0.2), std::log(0.2)},
      {std::log(0.2), std::log(0.2), std::log(0.2)},
  };
  lm.validate();
  Transcription t{{1, 0, 2}};
  const double expect =
      std::log(0.3) + std::log(0.1) + std::log(0.25) + std::log(0.4);
  CHECK(lm_log_prob(lm, t) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("enumerate_transcriptions counts and prunes") {
  auto lm = uniform_lm(2, 0.4);
  auto all = enumerate_transcriptions(lm, 2);
  CHECK(all.size() == 6);  // 2 singles + 4 pairs
  for (std::size_t i = 1; i < all.size(); ++i)
    CHECK(all[i - 1].first < all[i].first);

  // Forbid "b after a": the pair (a b) disappears.
  lm.log_trans[0][1] = kLogZero;
  auto pruned = enumerate_transcriptions(lm, 2);
  CHECK(pruned.size() == 5);
  for (const auto& [t, lp] : pruned) {
    CHECK(lp == doctest::Approx(lm_log_prob(lm, t)).epsilon(1e-12));
    CHECK(!(t == Transcription{{0, 1}}));
  }

  auto lm3 = uniform_lm(3, 0.3);
  auto all3 = enumerate_transcriptions(lm3, 3);
  CHECK(all3.size() == 39);  // 3 + 9 + 27
  double mass = 0.0;
  for (const auto& [t, lp] : all3) mass += std::exp(lp);
  CHECK(mass <= 1.0 + 1e-12);
  CHECK(mass > 0.4);  // most sequences end within 3 words

  CHECK_THROWS_AS(enumerate_transcriptions(lm3, 3, 10), ConfigError);
}

TEST_CASE("compile_utterance_graph path counts follow stars and bars") {
  auto model = tiny_model(1, {3});
  Lexicon lex{{"w"}, {{0}}};
  Transcription t{{0}};
  auto g = compile_utterance_graph(lex, model, t, SilencePolicy::kNone);
  g.validate();

  CHECK(enumerate_paths(model, g, const_frames(3, 1, 0.0), 1.0).size() == 1);
  CHECK(enumerate_paths(model, g, const_frames(4, 1, 0.0), 1.0).size() == 3);

  // m states over n frames: C(n-1, m-1) monotone duration splits.
  auto model2 = tiny_model(1, {3, 2});
  Lexicon lex2{{"a", "b"}, {{0}, {1, 0}}};
  for (int words = 1; words <= 2; ++words) {
    Transcription tr{words == 1 ? std::vector<int>{1} : std::vector<int>{1, 0}};
    int m = 0;
    for (int w : tr.words)
      for (int p : lex2.entries[w]) m += model2.topologies[p].num_states();
    for (int n = m; n <= 12; ++n) {
      auto graph =
          compile_utterance_graph(lex2, model2, tr, SilencePolicy::kNone);
      const auto paths =
          enumerate_paths(model2, graph, const_frames(n, 1, 0.0), 1.0);
      CHECK(static_cast<long>(paths.size()) == choose(n - 1, m - 1));
    }
  }
}

TEST_CASE("optional silence equals the union of forced-variant graphs") {
  auto model = tiny_model(1, {2, 2}, 0.5, true);
  Lexicon lex{{"a", "b", "SIL"}, {{0}, {1}, {model.silence_phone}}};
  Transcription both{{0, 1}};
  auto frames = FrameSequence{{0.1}, {1.9}, {2.2}, {4.1}, {6.3}, {5.9}, {6.1}};

  auto g_opt = compile_utterance_graph(lex, model, both,
                                       SilencePolicy::kOptionalEverywhere);
  const double f_opt =
      oracle_log_total(enumerate_paths(model, g_opt, frames, 1.0, 100000));

  // Three optional slots (start, interior, end); each silence choice costs
  // its branch probability. Forced variants compile with policy none and
  // silence spelled out as an explicit word.
  double mix = kLogZero;
  const double lp_sil = model.log_silence, lp_no = model.log_no_silence;
  for (int mask = 0; mask < 8; ++mask) {
    std::vector<int> words;
    if (mask & 1) words.push_back(2);
    words.push_back(0);
    if (mask & 2) words.push_back(2);
    words.push_back(1);
    if (mask & 4) words.push_back(2);
    const double branch = ((mask & 1) ? lp_sil : lp_no) +
                          ((mask & 2) ? lp_sil : lp_no) +
                          ((mask & 4) ? lp_sil : lp_no);
    try {
      auto g = compile_utterance_graph(lex, model, Transcription{words},
                                       SilencePolicy::kNone);
      mix = log_add(mix, branch + forward_total(model, g, frames, 1.0));
    } catch (const EmptyCompositionError&) {
    }
  }
  CHECK(f_opt == doctest::Approx(mix).epsilon(1e-10));
}

TEST_CASE("forward over optional silence equals the branch mixture") {
  // Cleanest decomposition: boundary policy with a single word, so the
  // only optional slots are the two boundaries.
  auto model = tiny_model(1, {2}, 0.5, true);
  Lexicon lex{{"a", "SIL"}, {{0}, {model.silence_phone}}};
  Transcription just_a{{0}};
  auto frames = FrameSequence{{0.4}, {1.2}, {2.0}, {1.7}};

  auto g_opt = compile_utterance_graph(lex, model, just_a,
                                       SilencePolicy::kOptionalBoundary);
  const double f_opt = forward_total(model, g_opt, frames, 1.0);

  double mix = kLogZero;
  const std::vector<std::vector<int>> variants = {
      {0}, {1, 0}, {0, 1}, {1, 0, 1}};
  const double p_sil = std::exp(model.log_silence);
  for (const auto& words : variants) {
    int sils = static_cast<int>(words.size()) - 1;
    double branch = sils * std::log(p_sil) + (2 - sils) * std::log(1.0 - p_sil);
    try {
      auto g = compile_utterance_graph(lex, model, Transcription{words},
                                       SilencePolicy::kNone);
      mix = log_add(mix, branch + forward_total(model, g, frames, 1.0));
    } catch (const EmptyCompositionError&) {
    }
  }
  CHECK(f_opt == doctest::Approx(mix).epsilon(1e-10));
}

TEST_CASE("compile_decoding_graph recognizes the dominant word") {
  auto model = tiny_model(1, {2, 2});
  // Word means around 2,4 (word a) and 6,8 (word b).
  Lexicon lex{{"a", "b"}, {{0}, {1}}};
  BigramLm lm;
  lm.vocab = 2;
  lm.log_begin = {std::log(0.5), std::log(0.5)};
  lm.log_end = {std::log(0.5), std::log(0.5)};
  lm.log_trans = {{std::log(0.25), std::log(0.25)},
                  {std::log(0.25), std::log(0.25)}};
  lm.validate();

  auto g = compile_decoding_graph(lex, lm, model, SilencePolicy::kNone);
  g.validate();
  FrameSequence at_a{{0.0}, {2.0}};
  auto vit = viterbi(model, g, at_a, 1.0);
  CHECK(words_of_path(g, vit.path) == Transcription{{0}});

  FrameSequence at_b{{4.0}, {6.0}};
  CHECK(words_of_path(g, viterbi(model, g, at_b, 1.0).path) ==
        Transcription{{1}});

  // Every decode carries at least one word: no empty path exists. (The
  // 2-state words need at least two frames.)
  for (int n = 2; n <= 5; ++n) {
    auto v = viterbi(model, g, const_frames(n, 1, 3.0), 1.0);
    CHECK(words_of_path(g, v.path).length() >= 1);
  }
}

TEST_CASE("single-word loop graph always decodes that word") {
  auto model = tiny_model(1, {1});
  Lexicon lex{{"a"}, {{0}}};
  BigramLm lm;
  lm.vocab = 1;
  lm.log_begin = {0.0};
  lm.log_end = {0.0};          // must end after one word
  lm.log_trans = {{kLogZero}};
  lm.validate();
  auto g = compile_decoding_graph(lex, lm, model, SilencePolicy::kNone);
  for (int n = 1; n <= 5; ++n) {
    auto vit = viterbi(model, g, const_frames(n, 1, -2.0), 1.0);
    CHECK(words_of_path(g, vit.path) == Transcription{{0}});
  }
}
