// src/lexicon.cpp
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

#include "mmilab/lexicon.hpp"

#include <cmath>

namespace mmilab {

std::vector<int> Lexicon::phones_of(const Transcription& t) const {
  std::vector<int> out;
  for (int w : t.words) {
    require(w >= 0 && w < size(), "lexicon: unknown word");
    const auto& pron = entries[w];
    out.insert(out.end(), pron.begin(), pron.end());
  }
  return out;
}

void BigramLm::validate() const {
  require(vocab > 0 && static_cast<int>(log_begin.size()) == vocab &&
              static_cast<int>(log_end.size()) == vocab &&
              static_cast<int>(log_trans.size()) == vocab,
          "bigram: shape mismatch");
  auto check_row = [](const std::vector<double>& probs, double extra) {
    double s = extra;
    for (double lp : probs) s += lp == kLogZero ? 0.0 : std::exp(lp);
    require(std::abs(s - 1.0) <= 1e-9, "bigram: row sum != 1");
  };
  check_row(log_begin, 0.0);
  for (int w = 0; w < vocab; ++w)
    check_row(log_trans[w], log_end[w] == kLogZero ? 0.0 : std::exp(log_end[w]));
}

double lm_log_prob(const BigramLm& lm, const Transcription& t) {
  require(t.length() >= 1, "lm_log_prob: empty transcription");
  for (int w : t.words)
    require(w >= 0 && w < lm.vocab, "lm_log_prob: unknown word");
  double acc = lm.log_begin[t.words.front()];
  for (int i = 1; i < t.length(); ++i)
    acc += lm.log_trans[t.words[i - 1]][t.words[i]];
  acc += lm.log_end[t.words.back()];
  return acc;
}

const char* to_string(SilencePolicy p) {
  switch (p) {
    case SilencePolicy::kNone: return "none";
    case SilencePolicy::kOptionalBoundary: return "optional-boundary";
    case SilencePolicy::kOptionalEverywhere: return "optional-everywhere";
  }
  return "?";
}

SilencePolicy silence_policy_from_string(const std::string& s) {
  if (s == "none") return SilencePolicy::kNone;
  if (s == "optional-boundary") return SilencePolicy::kOptionalBoundary;
  if (s == "optional-everywhere") return SilencePolicy::kOptionalEverywhere;
  throw ConfigError("unknown silence policy: " + s);
}

namespace {

// Incremental construction shared by the utterance and decoding compilers.
// Junction (epsilon) nodes route every word/silence boundary so word
// occurrences can be read back off the node sequence.
class GraphBuilder {
 public:
  GraphBuilder(const AcousticModel& model, DecodeGraph& g)
      : model_(model), g_(g) {}

  int add_junction() {
    return g_.add_node(DecodeGraph::Node{});
  }

  // Chains `phone` between two fresh-node endpoints: entry arcs leave
  // `from`, the exit arc lands on `to`. Returns the first state node.
  int add_phone(int phone, int from, int to, double entry_log_prob,
                int word_label, int word_pos) {
    const auto& topo = model_.topologies[phone];
    const int unit = static_cast<int>(g_.unit_phone.size());
    g_.unit_phone.push_back(phone);
    g_.unit_word_pos.push_back(word_pos);
    int prev = -1, first = -1;
    for (int s = 0; s < topo.num_states(); ++s) {
      DecodeGraph::Node node;
      node.state_id = topo.state_ids[s];
      node.phone = phone;
      node.unit = unit;
      if (s == 0) node.word = word_label;
      const int cur = g_.add_node(node);
      if (s == 0) {
        first = cur;
        g_.add_arc(from, cur, entry_log_prob, word_label, phone);
      } else {
        g_.add_arc(prev, cur, topo.log_next[s - 1]);
      }
      g_.add_arc(cur, cur, topo.log_self[s]);
      prev = cur;
    }
    g_.add_arc(prev, to, topo.log_next[topo.num_states() - 1]);
    return first;
  }

  // Optional silence block between junctions: either bypass or a silence
  // unit, weighted by the model's branch probabilities.
  int add_optional_silence(int from) {
    const int to = add_junction();
    if (model_.silence_phone < 0) {
      g_.add_arc(from, to, 0.0);
      return to;
    }
    g_.add_arc(from, to, model_.log_no_silence);
    add_phone(model_.silence_phone, from, to, model_.log_silence, -1, -1);
    return to;
  }

  // Word as a phone chain between junctions; the LM weight (if any) rides
  // the first entry arc.
  void add_word(const Lexicon& lex, int word, int word_pos, int from, int to,
                double lm_log) {
    const auto& pron = lex.entries[word];
    require(!pron.empty(), "lexicon: empty pronunciation");
    int cur = from;
    for (std::size_t p = 0; p < pron.size(); ++p) {
      const bool last = (p + 1 == pron.size());
      const int next = last ? to : add_junction();
      add_phone(pron[p], cur, next, p == 0 ? lm_log : 0.0,
                p == 0 ? word : -1, word_pos);
      cur = next;
    }
  }

 private:
  const AcousticModel& model_;
  DecodeGraph& g_;
};

}  // namespace

DecodeGraph compile_utterance_graph(const Lexicon& lex,
                                    const AcousticModel& model,
                                    const Transcription& t,
                                    SilencePolicy silence) {
  require(t.length() >= 1, "compile_utterance_graph: empty transcription");
  for (int w : t.words)
    require(w >= 0 && w < lex.size(), "compile_utterance_graph: unknown word");
  DecodeGraph g;
  GraphBuilder b(model, g);
  int cur = b.add_junction();
  g.start_nodes.push_back(cur);
  if (silence != SilencePolicy::kNone) cur = b.add_optional_silence(cur);
  for (int i = 0; i < t.length(); ++i) {
    if (i > 0 && silence == SilencePolicy::kOptionalEverywhere)
      cur = b.add_optional_silence(cur);
    const int next = b.add_junction();
    b.add_word(lex, t.words[i], i, cur, next, 0.0);
    cur = next;
  }
  if (silence != SilencePolicy::kNone) cur = b.add_optional_silence(cur);
  g.final_nodes.push_back(cur);
  return g;
}

DecodeGraph compile_decoding_graph(const Lexicon& lex, const BigramLm& lm,
                                   const AcousticModel& model,
                                   SilencePolicy silence) {
  require(lex.size() == lm.vocab, "compile_decoding_graph: lexicon/LM size");
  DecodeGraph g;
  GraphBuilder b(model, g);
  int start = b.add_junction();
  g.start_nodes.push_back(start);
  if (silence != SilencePolicy::kNone) start = b.add_optional_silence(start);

  const int pre_final = b.add_junction();
  std::vector<int> word_entry(lex.size(), -1), word_exit(lex.size(), -1);
  for (int w = 0; w < lex.size(); ++w) {
    const int in = b.add_junction();
    const int out = b.add_junction();
    b.add_word(lex, w, -1, in, out, 0.0);
    word_entry[w] = in;
    word_exit[w] = out;
  }
  for (int w = 0; w < lex.size(); ++w) {
    if (lm.log_begin[w] != kLogZero)
      g.add_arc(start, word_entry[w], lm.log_begin[w]);
    if (lm.log_end[w] != kLogZero)
      g.add_arc(word_exit[w], pre_final, lm.log_end[w]);
    int from = word_exit[w];
    if (silence == SilencePolicy::kOptionalEverywhere)
      from = b.add_optional_silence(from);
    for (int v = 0; v < lex.size(); ++v)
      if (lm.log_trans[w][v] != kLogZero)
        g.add_arc(from, word_entry[v], lm.log_trans[w][v]);
  }
  int fin = pre_final;
  if (silence != SilencePolicy::kNone) fin = b.add_optional_silence(fin);
  g.final_nodes.push_back(fin);
  return g;
}

std::vector<std::pair<Transcription, double>> enumerate_transcriptions(
    const BigramLm& lm, int max_len, std::size_t cap) {
  require(max_len >= 1, "enumerate_transcriptions: max_len < 1");
  std::vector<std::pair<Transcription, double>> out;
  std::vector<int> prefix;
  // Depth-first in word-id order emits lexicographically sorted results.
  auto dfs = [&](auto&& self, double chain) -> void {
    if (!prefix.empty() && lm.log_end[prefix.back()] != kLogZero) {
      if (out.size() >= cap)
        throw ConfigError("enumerate_transcriptions: cap exceeded");
      out.emplace_back(Transcription{prefix}, chain + lm.log_end[prefix.back()]);
    }
    if (static_cast<int>(prefix.size()) == max_len) return;
    for (int w = 0; w < lm.vocab; ++w) {
      const double step =
          prefix.empty() ? lm.log_begin[w] : lm.log_trans[prefix.back()][w];
      if (step == kLogZero) continue;
      prefix.push_back(w);
      self(self, chain + step);
      prefix.pop_back();
    }
  };
  dfs(dfs, 0.0);
  return out;
}

Transcription words_of_path(const DecodeGraph& graph,
                            const std::vector<int>& path) {
  Transcription t;
  int prev = -1;
  for (int v : path) {
    if (v != prev && graph.nodes[v].word >= 0) t.words.push_back(graph.nodes[v].word);
    prev = v;
  }
  return t;
}

}  // namespace mmilab
