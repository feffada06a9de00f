// include/mmilab/graph.hpp
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

#ifndef MMILAB_GRAPH_HPP
#define MMILAB_GRAPH_HPP

#include <vector>

#include "mmilab/common.hpp"
#include "mmilab/model.hpp"

namespace mmilab {

// State graph evaluated against a frame sequence. Emitting nodes carry a
// Gaussian index and consume one frame each; epsilon nodes (state_id < 0)
// are connective only and must not form cycles. A complete path for n
// frames runs from a start node to a final node through exactly n emitting
// nodes.
struct DecodeGraph {
  struct Node {
    int state_id = -1;  // Gaussian index, or -1 for epsilon
    int phone = -1;     // phone id of the unit this node belongs to
    int unit = -1;      // running index of the phone instance in the graph
    int word = -1;      // word id attached when this node starts a word

    bool emitting() const { return state_id >= 0; }
  };
  struct Arc {
    int src = 0;
    int dst = 0;
    double log_prob = 0.0;
    int word_label = -1;   // word id announced when crossing this arc
    int phone_label = -1;  // phone id announced when crossing this arc
  };

  std::vector<Node> nodes;
  std::vector<Arc> arcs;
  std::vector<int> start_nodes;
  std::vector<int> final_nodes;
  // Per phone instance (indexed by Node::unit): its phone id and the
  // position of the parent word in the source transcription (-1 for
  // silence or loop graphs). Filled by the compilers.
  std::vector<int> unit_phone;
  std::vector<int> unit_word_pos;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int add_node(const Node& n) {
    nodes.push_back(n);
    return num_nodes() - 1;
  }
  void add_arc(int src, int dst, double log_prob, int word_label = -1,
               int phone_label = -1) {
    arcs.push_back(Arc{src, dst, log_prob, word_label, phone_label});
  }

  // Checks epsilon acyclicity and non-empty start/final sets.
  void validate() const;
};

struct ForwardBackwardResult {
  // posteriors[t][v] over graph nodes; epsilon nodes stay 0. Each frame's
  // row sums to 1 up to roundoff.
  std::vector<std::vector<double>> posteriors;
  double total_log_likelihood = kLogZero;
};

struct ViterbiResult {
  // Node indices from a start node to a final node, epsilon nodes included.
  std::vector<int> path;
  double score = kLogZero;
  // The t-th emitting entry of `path`, as an index into it.
  std::vector<int> emitting_positions;
};

// Sum over all complete paths of (scaled emission + transition) scores.
// acoustic_scale multiplies the per-frame Gaussian log-densities only.
// Throws EmptyCompositionError when the graph admits no complete path.
ForwardBackwardResult forward_backward(const AcousticModel& model,
                                       const DecodeGraph& graph,
                                       const FrameSequence& frames,
                                       double acoustic_scale);

// Forward pass only; cheaper when posteriors are not needed.
double forward_total(const AcousticModel& model, const DecodeGraph& graph,
                     const FrameSequence& frames, double acoustic_scale);

// Best complete path under the same scoring. Exact score ties resolve to
// the lexicographically smallest node-index sequence.
ViterbiResult viterbi(const AcousticModel& model, const DecodeGraph& graph,
                      const FrameSequence& frames, double acoustic_scale);

}  // namespace mmilab

#endif  // MMILAB_GRAPH_HPP
