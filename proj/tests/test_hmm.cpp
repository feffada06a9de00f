// tests/test_hmm.cpp
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

#include "mmilab/graph.hpp"
#include "mmilab/model.hpp"
#include "oracle_helpers.hpp"

using namespace mmilab;
using namespace mmilab::testing;

TEST_CASE("log_gaussian_density matches the closed form") {
  DiagonalGaussian g{{0.0}, {1.0}};
  CHECK(log_gaussian_density(g, {0.0}) ==
        doctest::Approx(-0.5 * std::log(2.0 * M_PI)).epsilon(1e-12));

  DiagonalGaussian wide{{0.0}, {4.0}};
  CHECK(log_gaussian_density(wide, {2.0}) ==
        doctest::Approx(-0.5 * std::log(2.0 * M_PI) - 0.5 * std::log(4.0) - 0.5)
            .epsilon(1e-12));

  DiagonalGaussian two{{0.0, 0.0}, {1.0, 1.0}};
  CHECK(log_gaussian_density(two, {1.0, 1.0}) ==
        doctest::Approx(-std::log(2.0 * M_PI) - 1.0).epsilon(1e-12));

  CHECK_THROWS_AS(log_gaussian_density(g, {1.0, 2.0}), ContractError);
}

TEST_CASE("log_gaussian_density is permutation invariant") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> pos(0.2, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 5;
    DiagonalGaussian g;
    FeatureVector y(d);
    for (int i = 0; i < d; ++i) {
      g.mean.push_back(gauss(rng));
      g.var.push_back(pos(rng));
      y[i] = gauss(rng);
    }
    std::vector<int> perm{3, 1, 4, 0, 2};
    DiagonalGaussian pg;
    FeatureVector py(d);
    for (int i = 0; i < d; ++i) {
      pg.mean.push_back(g.mean[perm[i]]);
      pg.var.push_back(g.var[perm[i]]);
      py[i] = y[perm[i]];
    }
    CHECK(log_gaussian_density(g, y) ==
          doctest::Approx(log_gaussian_density(pg, py)).epsilon(1e-12));
  }
}

TEST_CASE("log_sum_exp basics") {
  CHECK(log_sum_exp({0.0, 0.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(log_sum_exp({kLogZero, -3.5}) == doctest::Approx(-3.5).epsilon(1e-14));
  CHECK(log_sum_exp({std::log(0.25), std::log(0.75)}) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(log_sum_exp({-1234.5}) == -1234.5);
  CHECK(log_sum_exp({kLogZero, kLogZero}) == kLogZero);
  CHECK_THROWS_AS(log_sum_exp(std::vector<double>{}), ContractError);
}

namespace {

// Single emitting node with a probability-1 self loop.
DecodeGraph self_loop_graph() {
  DecodeGraph g;
  g.add_node({0, 0, 0, -1});
  g.add_arc(0, 0, 0.0);
  g.start_nodes = {0};
  g.final_nodes = {0};
  return g;
}

// Two parallel 1-node branches between epsilon endpoints.
DecodeGraph fork_graph(double lp_a, double lp_b) {
  DecodeGraph g;
  const int start = g.add_node({-1, -1, -1, -1});
  const int a = g.add_node({0, 0, 0, -1});
  const int b = g.add_node({1, 1, 1, -1});
  const int fin = g.add_node({-1, -1, -1, -1});
  g.add_arc(start, a, lp_a);
  g.add_arc(start, b, lp_b);
  g.add_arc(a, a, std::log(0.5));
  g.add_arc(b, b, std::log(0.5));
  g.add_arc(a, fin, std::log(0.5));
  g.add_arc(b, fin, std::log(0.5));
  g.start_nodes = {start};
  g.final_nodes = {fin};
  return g;
}

}  // namespace

TEST_CASE("forward_backward on a single self-loop node") {
  auto model = tiny_model(2, {1});
  auto g = self_loop_graph();
  FrameSequence frames{{0.1, -0.2}, {1.0, 0.5}, {-0.3, 0.9}, {0.0, 0.0}};
  auto fb = forward_backward(model, g, frames, 1.0);
  double expect = 0.0;
  for (const auto& y : frames) expect += log_gaussian_density(model.states[0], y);
  CHECK(fb.total_log_likelihood == doctest::Approx(expect).epsilon(1e-12));
  for (const auto& row : fb.posteriors)
    CHECK(row[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("forward_backward equals path enumeration on a fork graph") {
  auto model = tiny_model(1, {1, 1});
  auto g = fork_graph(std::log(0.3), std::log(0.7));
  FrameSequence frames{{0.5}, {1.5}, {2.5}};
  auto paths = enumerate_paths(model, g, frames, 1.0);
  CHECK(paths.size() == 2);
  auto fb = forward_backward(model, g, frames, 1.0);
  CHECK(fb.total_log_likelihood ==
        doctest::Approx(oracle_log_total(paths)).epsilon(1e-12));
}

TEST_CASE("acoustic_scale zero reduces to transition mass") {
  auto model = tiny_model(1, {1, 1});
  auto g = fork_graph(std::log(0.4), std::log(0.6));
  FrameSequence frames{{0.0}, {0.0}, {0.0}, {0.0}};
  auto paths = enumerate_paths(model, g, frames, 0.0);
  auto total = forward_total(model, g, frames, 0.0);
  CHECK(total == doctest::Approx(oracle_log_total(paths)).epsilon(1e-12));
}

TEST_CASE("posteriors sum to one per frame") {
  auto model = tiny_model(1, {3}, 0.4, true);
  Lexicon lex{{"w"}, {{0}}};
  auto g = compile_utterance_graph(lex, model, Transcription{{0}},
                                   SilencePolicy::kOptionalBoundary);
  FrameSequence frames = const_frames(7, 1, 1.0);
  auto fb = forward_backward(model, g, frames, 1.0);
  for (const auto& row : fb.posteriors) {
    double s = 0.0;
    for (double v : row) {
      CHECK(v >= 0.0);
      s += v;
    }
    CHECK(std::abs(s - 1.0) <= 1e-10);
  }
}

TEST_CASE("forward_backward matches enumeration on compiled graphs") {
  auto model = tiny_model(1, {2, 1}, 0.5, true);
  Lexicon lex{{"ab", "c"}, {{0, 1}, {1}}};
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    Transcription t{trial % 2 == 0 ? std::vector<int>{0}
                                   : std::vector<int>{1, 0}};
    auto g = compile_utterance_graph(lex, model, t,
                                     SilencePolicy::kOptionalBoundary);
    const int n = 4 + trial % 3;
    FrameSequence frames;
    for (int i = 0; i < n; ++i) frames.push_back({gauss(rng)});
    auto paths = enumerate_paths(model, g, frames, 1.0);
    if (paths.empty()) {
      CHECK_THROWS_AS(forward_backward(model, g, frames, 1.0),
                      EmptyCompositionError);
      continue;
    }
    CHECK(paths.size() <= 500);
    auto fb = forward_backward(model, g, frames, 1.0);
    CHECK(fb.total_log_likelihood ==
          doctest::Approx(oracle_log_total(paths)).epsilon(1e-9));

    auto vit = viterbi(model, g, frames, 1.0);
    auto best = oracle_best_path(paths);
    CHECK(vit.score == doctest::Approx(best.score).epsilon(1e-9));
    CHECK(vit.path == best.nodes);
    CHECK(vit.score <= fb.total_log_likelihood + 1e-12);
  }
}

TEST_CASE("viterbi follows the single path and ties break lexicographically") {
  auto model = tiny_model(2, {1});
  auto g = self_loop_graph();
  FrameSequence frames = const_frames(3, 2, 0.5);
  auto vit = viterbi(model, g, frames, 1.0);
  auto fb = forward_backward(model, g, frames, 1.0);
  CHECK(vit.score == doctest::Approx(fb.total_log_likelihood).epsilon(1e-12));
  CHECK(vit.path == std::vector<int>{0, 0, 0});

  // Symmetric fork: both branches score identically; the lexicographically
  // smaller node sequence must win.
  auto model2 = tiny_model(1, {1, 1});
  model2.states[1] = model2.states[0];
  auto g2 = fork_graph(std::log(0.5), std::log(0.5));
  auto vit2 = viterbi(model2, g2, const_frames(2, 1, 0.3), 1.0);
  auto paths = enumerate_paths(model2, g2, const_frames(2, 1, 0.3), 1.0);
  auto best = oracle_best_path(paths);
  CHECK(vit2.path == best.nodes);
  CHECK(vit2.path.front() == 0);
  CHECK(vit2.path[1] == 1);  // branch through node 1, not node 2
}

TEST_CASE("no complete path raises empty composition") {
  auto model = tiny_model(1, {3});
  Lexicon lex{{"w"}, {{0}}};
  auto g = compile_utterance_graph(lex, model, Transcription{{0}},
                                   SilencePolicy::kNone);
  // 3-state no-skip phone cannot emit 2 frames.
  CHECK_THROWS_AS(forward_backward(model, g, const_frames(2, 1, 0.0), 1.0),
                  EmptyCompositionError);
  CHECK_THROWS_AS(viterbi(model, g, const_frames(2, 1, 0.0), 1.0),
                  EmptyCompositionError);
}

TEST_CASE("viterbi score never exceeds the forward total") {
  auto model = tiny_model(1, {2, 1}, 0.6, true);
  Lexicon lex{{"a", "b"}, {{0}, {1, 0}}};
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss(1.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    Transcription t{{trial % 2, (trial / 2) % 2}};
    auto g = compile_utterance_graph(lex, model, t,
                                     SilencePolicy::kOptionalEverywhere);
    FrameSequence frames;
    for (int i = 0; i < 9; ++i) frames.push_back({gauss(rng)});
    auto total = forward_total(model, g, frames, 1.0);
    auto vit = viterbi(model, g, frames, 1.0);
    CHECK(vit.score <= total + 1e-12);
    CHECK(vit.emitting_positions.size() == frames.size());
  }
}
