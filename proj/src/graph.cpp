// src/graph.cpp
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

#include "mmilab/graph.hpp"

#include <algorithm>
#include <cmath>

namespace mmilab {

namespace {

// Shared per-call scaffolding: adjacency, epsilon topological order, and
// per-frame emission scores for the distinct Gaussians the graph touches.
struct GraphWork {
  const DecodeGraph& graph;
  const AcousticModel& model;
  const FrameSequence& frames;
  double scale;

  std::vector<std::vector<int>> out_arcs;  // arc indices by source node
  std::vector<int> eps_topo;               // epsilon nodes, sources first
  std::vector<int> gauss_slot;             // gauss id -> dense slot
  std::vector<double> dens;                // [frame * n_slots + slot]
  int n_slots = 0;

  GraphWork(const AcousticModel& m, const DecodeGraph& g,
            const FrameSequence& f, double acoustic_scale)
      : graph(g), model(m), frames(f), scale(acoustic_scale) {
    require(!frames.empty(), "forward_backward: no frames");
    require(!graph.start_nodes.empty() && !graph.final_nodes.empty(),
            "forward_backward: empty start or final set");
    const int nn = graph.num_nodes();
    out_arcs.assign(nn, {});
    std::vector<int> eps_in_degree(nn, 0);
    for (std::size_t a = 0; a < graph.arcs.size(); ++a) {
      const auto& arc = graph.arcs[a];
      out_arcs[arc.src].push_back(static_cast<int>(a));
      if (!graph.nodes[arc.src].emitting() && !graph.nodes[arc.dst].emitting())
        ++eps_in_degree[arc.dst];
    }
    std::vector<int> stack;
    for (int v = 0; v < nn; ++v)
      if (!graph.nodes[v].emitting() && eps_in_degree[v] == 0)
        stack.push_back(v);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      eps_topo.push_back(v);
      for (int a : out_arcs[v]) {
        int d = graph.arcs[a].dst;
        if (!graph.nodes[d].emitting() && --eps_in_degree[d] == 0)
          stack.push_back(d);
      }
    }
    int n_eps = 0;
    for (const auto& n : graph.nodes)
      if (!n.emitting()) ++n_eps;
    require(static_cast<int>(eps_topo.size()) == n_eps,
            "decode graph: cycle through epsilon nodes");

    gauss_slot.assign(model.num_states(), -1);
    for (const auto& n : graph.nodes) {
      if (!n.emitting()) continue;
      require(n.state_id < model.num_states(), "decode graph: bad state id");
      if (gauss_slot[n.state_id] < 0) gauss_slot[n.state_id] = n_slots++;
    }
    dens.resize(frames.size() * n_slots);
    for (std::size_t t = 0; t < frames.size(); ++t)
      for (int s = 0; s < model.num_states(); ++s)
        if (gauss_slot[s] >= 0)
          dens[t * n_slots + gauss_slot[s]] =
              scale * log_gaussian_density(model.states[s], frames[t]);
  }

  double emit(std::size_t t, int node) const {
    return dens[t * n_slots + gauss_slot[graph.nodes[node].state_id]];
  }
  int frame_count() const { return static_cast<int>(frames.size()); }
};

// Forward pass. alpha[t][v] covers emitting v only; `final_total` is the
// log-sum over complete paths.
struct ForwardPass {
  std::vector<std::vector<double>> alpha;
  double final_total = kLogZero;
};

ForwardPass run_forward(const GraphWork& w) {
  const auto& g = w.graph;
  const int nn = g.num_nodes();
  const int n = w.frame_count();
  ForwardPass fp;
  fp.alpha.assign(n, std::vector<double>(nn, kLogZero));

  std::vector<double> in(nn, kLogZero);
  for (int s : g.start_nodes) in[s] = log_add(in[s], 0.0);
  auto eps_close = [&](std::vector<double>& score) {
    for (int e : w.eps_topo) {
      if (score[e] == kLogZero) continue;
      for (int a : w.out_arcs[e]) {
        const auto& arc = g.arcs[a];
        score[arc.dst] = log_add(score[arc.dst], score[e] + arc.log_prob);
      }
    }
  };
  eps_close(in);

  for (int t = 0; t < n; ++t) {
    auto& row = fp.alpha[t];
    for (int v = 0; v < nn; ++v)
      if (g.nodes[v].emitting() && in[v] != kLogZero)
        row[v] = in[v] + w.emit(t, v);
    if (t + 1 < n) {
      std::fill(in.begin(), in.end(), kLogZero);
      for (int u = 0; u < nn; ++u) {
        if (!g.nodes[u].emitting() || row[u] == kLogZero) continue;
        for (int a : w.out_arcs[u]) {
          const auto& arc = g.arcs[a];
          in[arc.dst] = log_add(in[arc.dst], row[u] + arc.log_prob);
        }
      }
      eps_close(in);
    }
  }

  // Termination: epsilon moves after the last emission, or stopping on an
  // emitting final node.
  std::vector<double> tail(nn, kLogZero);
  for (int u = 0; u < nn; ++u) {
    if (!g.nodes[u].emitting() || fp.alpha[n - 1][u] == kLogZero) continue;
    for (int a : w.out_arcs[u]) {
      const auto& arc = g.arcs[a];
      if (!g.nodes[arc.dst].emitting())
        tail[arc.dst] =
            log_add(tail[arc.dst], fp.alpha[n - 1][u] + arc.log_prob);
    }
  }
  for (int e : w.eps_topo) {
    if (tail[e] == kLogZero) continue;
    for (int a : w.out_arcs[e]) {
      const auto& arc = g.arcs[a];
      if (!g.nodes[arc.dst].emitting())
        tail[arc.dst] = log_add(tail[arc.dst], tail[e] + arc.log_prob);
    }
  }
  for (int f : g.final_nodes) {
    const double m = g.nodes[f].emitting() ? fp.alpha[n - 1][f] : tail[f];
    fp.final_total = log_add(fp.final_total, m);
  }
  return fp;
}

}  // namespace

void DecodeGraph::validate() const {
  require(!start_nodes.empty() && !final_nodes.empty(),
          "decode graph: empty start or final set");
  for (const auto& arc : arcs)
    require(arc.src >= 0 && arc.src < num_nodes() && arc.dst >= 0 &&
                arc.dst < num_nodes(),
            "decode graph: dangling arc");
  // Epsilon acyclicity is re-derived (and enforced) by the DP scaffolding;
  // reuse it via a throwaway pass over an empty model.
  std::vector<std::vector<int>> out(num_nodes());
  std::vector<int> indeg(num_nodes(), 0);
  for (const auto& arc : arcs)
    if (!nodes[arc.src].emitting() && !nodes[arc.dst].emitting()) {
      out[arc.src].push_back(arc.dst);
      ++indeg[arc.dst];
    }
  std::vector<int> stack;
  int eps_total = 0, seen = 0;
  for (int v = 0; v < num_nodes(); ++v)
    if (!nodes[v].emitting()) {
      ++eps_total;
      if (indeg[v] == 0) stack.push_back(v);
    }
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    ++seen;
    for (int d : out[v])
      if (--indeg[d] == 0) stack.push_back(d);
  }
  require(seen == eps_total, "decode graph: cycle through epsilon nodes");
}

ForwardBackwardResult forward_backward(const AcousticModel& model,
                                       const DecodeGraph& graph,
                                       const FrameSequence& frames,
                                       double acoustic_scale) {
  GraphWork w(model, graph, frames, acoustic_scale);
  ForwardPass fp = run_forward(w);
  if (fp.final_total == kLogZero)
    throw EmptyCompositionError("forward_backward: empty composition");

  const auto& g = graph;
  const int nn = g.num_nodes();
  const int n = w.frame_count();

  // beta[t][v]: continuation mass after emitting frame t at node v.
  std::vector<double> beta(nn, kLogZero), beta_prev(nn, kLogZero);
  std::vector<double> r(nn, kLogZero);
  std::vector<int> eps_rev(w.eps_topo.rbegin(), w.eps_topo.rend());

  // Termination values.
  std::vector<double> bterm(nn, kLogZero);
  for (int f : g.final_nodes) bterm[f] = 0.0;
  for (int e : eps_rev) {
    for (int a : w.out_arcs[e]) {
      const auto& arc = g.arcs[a];
      if (!g.nodes[arc.dst].emitting() && bterm[arc.dst] != kLogZero)
        bterm[e] = log_add(bterm[e], arc.log_prob + bterm[arc.dst]);
    }
  }
  for (int v = 0; v < nn; ++v) {
    if (!g.nodes[v].emitting()) continue;
    double acc = bterm[v];  // 0 if v itself is final
    for (int a : w.out_arcs[v]) {
      const auto& arc = g.arcs[a];
      if (!g.nodes[arc.dst].emitting() && bterm[arc.dst] != kLogZero)
        acc = log_add(acc, arc.log_prob + bterm[arc.dst]);
    }
    beta[v] = acc;
  }

  ForwardBackwardResult res;
  res.total_log_likelihood = fp.final_total;
  res.posteriors.assign(n, std::vector<double>(nn, 0.0));
  for (int t = n - 1; t >= 0; --t) {
    for (int v = 0; v < nn; ++v)
      if (g.nodes[v].emitting() && fp.alpha[t][v] != kLogZero &&
          beta[v] != kLogZero)
        res.posteriors[t][v] =
            std::exp(fp.alpha[t][v] + beta[v] - fp.final_total);
    if (t == 0) break;
    std::fill(r.begin(), r.end(), kLogZero);
    for (int v = 0; v < nn; ++v)
      if (g.nodes[v].emitting() && beta[v] != kLogZero)
        r[v] = beta[v] + w.emit(t, v);
    for (int e : eps_rev) {
      for (int a : w.out_arcs[e]) {
        const auto& arc = g.arcs[a];
        if (r[arc.dst] != kLogZero)
          r[e] = log_add(r[e], arc.log_prob + r[arc.dst]);
      }
    }
    std::swap(beta_prev, beta);
    std::fill(beta.begin(), beta.end(), kLogZero);
    for (int u = 0; u < nn; ++u) {
      if (!g.nodes[u].emitting()) continue;
      double acc = kLogZero;
      for (int a : w.out_arcs[u]) {
        const auto& arc = g.arcs[a];
        if (r[arc.dst] != kLogZero)
          acc = log_add(acc, arc.log_prob + r[arc.dst]);
      }
      beta[u] = acc;
    }
  }
  return res;
}

double forward_total(const AcousticModel& model, const DecodeGraph& graph,
                     const FrameSequence& frames, double acoustic_scale) {
  GraphWork w(model, graph, frames, acoustic_scale);
  ForwardPass fp = run_forward(w);
  if (fp.final_total == kLogZero)
    throw EmptyCompositionError("forward_total: empty composition");
  return fp.final_total;
}

namespace {

// Viterbi bookkeeping. Scores live on "gap" stages: gap t holds mass about
// to emit frame t; gap n is the termination stage. from[t][v] records the
// node the best mass arrived from (-1 at path start); an emitting
// predecessor lives in gap t-1, an epsilon predecessor in gap t.
struct ViterbiState {
  const GraphWork& w;
  std::vector<std::vector<double>> in;        // gap scores, [n+1][nodes]
  std::vector<std::vector<int>> from;         // [n+1][nodes]
  std::vector<std::vector<double>> emitted;   // [n][nodes]

  explicit ViterbiState(const GraphWork& work) : w(work) {
    const int nn = w.graph.num_nodes();
    const int n = w.frame_count();
    in.assign(n + 1, std::vector<double>(nn, kLogZero));
    from.assign(n + 1, std::vector<int>(nn, -2));
    emitted.assign(n, std::vector<double>(nn, kLogZero));
  }

  // Full node sequence whose last element is `v` in gap `t` (for emitting
  // v, the emission of frame t).
  std::vector<int> prefix(int t, int v) const {
    std::vector<int> rev;
    while (v >= 0) {
      rev.push_back(v);
      int p = from[t][v];
      if (p >= 0 && w.graph.nodes[p].emitting()) --t;
      v = p;
    }
    std::reverse(rev.begin(), rev.end());
    return rev;
  }

  // Keep the better (score, then lexicographically smaller path) candidate
  // for node v in gap t, arriving from `src`.
  void offer(int t, int v, double score, int src) {
    if (score == kLogZero) return;
    double& cur = in[t][v];
    if (score > cur) {
      cur = score;
      from[t][v] = src;
      return;
    }
    if (score < cur) return;
    // Exact tie: compare the full candidate prefixes.
    std::vector<int> cand = src < 0 ? std::vector<int>{}
                            : prefix(w.graph.nodes[src].emitting() ? t - 1 : t,
                                     src);
    cand.push_back(v);
    std::vector<int> best = prefix(t, v);
    if (std::lexicographical_compare(cand.begin(), cand.end(), best.begin(),
                                     best.end()))
      from[t][v] = src;
  }
};

}  // namespace

ViterbiResult viterbi(const AcousticModel& model, const DecodeGraph& graph,
                      const FrameSequence& frames, double acoustic_scale) {
  GraphWork w(model, graph, frames, acoustic_scale);
  const auto& g = graph;
  const int nn = g.num_nodes();
  const int n = w.frame_count();
  ViterbiState st(w);

  for (int s : g.start_nodes) st.offer(0, s, 0.0, -1);
  auto eps_close = [&](int t, bool termination) {
    for (int e : w.eps_topo) {
      if (st.in[t][e] == kLogZero) continue;
      for (int a : w.out_arcs[e]) {
        const auto& arc = g.arcs[a];
        if (termination && g.nodes[arc.dst].emitting()) continue;
        st.offer(t, arc.dst, st.in[t][e] + arc.log_prob, e);
      }
    }
  };
  eps_close(0, false);

  for (int t = 0; t < n; ++t) {
    for (int v = 0; v < nn; ++v)
      if (g.nodes[v].emitting() && st.in[t][v] != kLogZero)
        st.emitted[t][v] = st.in[t][v] + w.emit(t, v);
    const bool termination = (t + 1 == n);
    for (int u = 0; u < nn; ++u) {
      if (!g.nodes[u].emitting() || st.emitted[t][u] == kLogZero) continue;
      for (int a : w.out_arcs[u]) {
        const auto& arc = g.arcs[a];
        if (termination && g.nodes[arc.dst].emitting()) continue;
        st.offer(t + 1, arc.dst, st.emitted[t][u] + arc.log_prob, u);
      }
    }
    eps_close(t + 1, termination);
  }

  // Select the best final node: emitting finals end at gap n-1 (their own
  // emission), epsilon finals at gap n.
  ViterbiResult best;
  bool have = false;
  for (int f : g.final_nodes) {
    const bool em = g.nodes[f].emitting();
    const double score = em ? st.emitted[n - 1][f] : st.in[n][f];
    if (score == kLogZero) continue;
    std::vector<int> path = st.prefix(em ? n - 1 : n, f);
    if (!have || score > best.score ||
        (score == best.score &&
         std::lexicographical_compare(path.begin(), path.end(),
                                      best.path.begin(), best.path.end()))) {
      best.score = score;
      best.path = std::move(path);
      have = true;
    }
  }
  if (!have) throw EmptyCompositionError("viterbi: empty composition");
  for (std::size_t i = 0; i < best.path.size(); ++i)
    if (g.nodes[best.path[i]].emitting())
      best.emitting_positions.push_back(static_cast<int>(i));
  require(static_cast<int>(best.emitting_positions.size()) == n,
          "viterbi: path emission count mismatch");
  return best;
}

}  // namespace mmilab
