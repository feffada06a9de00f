// src/config.cpp
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

#include "mmilab/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace mmilab {

namespace {

using ordered_json = nlohmann::ordered_json;

// Tracks which keys of one JSON object were consumed so leftovers can be
// reported with their full path.
class Section {
 public:
  Section(const ordered_json& j, std::string path)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object())
      throw ConfigError("config: " + path_ + " must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const std::exception&) {
      throw ConfigError("config: bad value at " + path_ + "/" + key);
    }
  }

  template <typename T>
  T required(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key))
      throw ConfigError("config: missing field " + path_ + "/" + key);
    try {
      return j_.at(key).get<T>();
    } catch (const std::exception&) {
      throw ConfigError("config: bad value at " + path_ + "/" + key);
    }
  }

  const ordered_json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key))
        throw ConfigError("config: unknown key " + path_ + "/" + key);
  }

 private:
  const ordered_json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::pair<int, int> int_pair(Section& s, const std::string& key, int lo,
                             int hi) {
  if (!s.has(key)) return {lo, hi};
  const auto& j = s.raw(key);
  if (!j.is_array() || j.size() != 2)
    throw ConfigError("config: expected [min, max] pair");
  return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config: cannot parse " + path.string() + ": " +
                      e.what());
  }

  RunConfig cfg;
  Section root(j, "");
  const int version = root.required<int>("schema_version");
  if (version != 1)
    throw ConfigError("config: unsupported schema_version " +
                      std::to_string(version));

  if (root.has("task")) {
    Section t(root.raw("task"), "/task");
    TaskSpec& s = cfg.task;
    s.vocab_size = t.get("vocab_size", s.vocab_size);
    s.phone_count = t.get("phone_count", s.phone_count);
    std::tie(s.phones_per_word_min, s.phones_per_word_max) = int_pair(
        t, "phones_per_word", s.phones_per_word_min, s.phones_per_word_max);
    s.feature_dim = t.get("feature_dim", s.feature_dim);
    s.frames_per_state = t.get("frames_per_state", s.frames_per_state);
    s.train_utterances = t.get("train_utterances", s.train_utterances);
    s.test_utterances = t.get("test_utterances", s.test_utterances);
    s.mean_separation = t.get("mean_separation", s.mean_separation);
    s.seed = t.get("seed", s.seed);
    std::tie(s.utterance_words_min, s.utterance_words_max) = int_pair(
        t, "utterance_words", s.utterance_words_min, s.utterance_words_max);
    if (t.has("silence_policy"))
      s.silence = silence_policy_from_string(
          t.get<std::string>("silence_policy", "optional-boundary"));
    s.silence_prob = t.get("silence_prob", s.silence_prob);
    s.bigram_zero_fraction =
        t.get("bigram_zero_fraction", s.bigram_zero_fraction);
    s.variance_floor_fraction =
        t.get("variance_floor_fraction", s.variance_floor_fraction);
    t.finish();
  }
  if (root.has("lattice")) {
    Section l(root.raw("lattice"), "/lattice");
    cfg.lattice.epsilon = l.get("epsilon", cfg.lattice.epsilon);
    cfg.lattice.max_len = l.get("max_len", cfg.lattice.max_len);
    cfg.lattice.kappa = l.get("kappa", cfg.lattice.kappa);
    cfg.lattice.enumeration_cap =
        l.get("enumeration_cap", cfg.lattice.enumeration_cap);
    l.finish();
  }
  if (root.has("ebw")) {
    Section e(root.raw("ebw"), "/ebw");
    cfg.ebw_e = e.get("E", cfg.ebw_e);
    cfg.ebw_d_min_doubling = e.get("d_min_doubling", cfg.ebw_d_min_doubling);
    e.finish();
  }
  if (root.has("run")) {
    Section r(root.raw("run"), "/run");
    if (r.has("regime"))
      cfg.regime = regime_from_string(r.get<std::string>("regime", "fixed"));
    if (r.has("objective")) {
      const std::string o = r.get<std::string>("objective", "mmi");
      if (o == "mmi")
        cfg.objective = Objective::kMmi;
      else if (o == "mpe")
        cfg.objective = Objective::kMpe;
      else
        throw ConfigError("config: unknown objective " + o);
    }
    cfg.iterations = r.get("iterations", cfg.iterations);
    cfg.ml_iterations = r.get("ml_iterations", cfg.ml_iterations);
    cfg.plan.exact_every = r.get("exact_every", cfg.plan.exact_every);
    cfg.plan.train_a_every = r.get("train_a_every", cfg.plan.train_a_every);
    cfg.plan.train_bc_every = r.get("train_bc_every", cfg.plan.train_bc_every);
    cfg.plan.test_every = r.get("test_every", cfg.plan.test_every);
    cfg.plan.log_mpe = r.get("log_mpe", cfg.plan.log_mpe);
    cfg.snapshot_iters =
        r.get("snapshot_iters", std::vector<int>{});
    cfg.jobs = r.get("jobs", cfg.jobs);
    r.finish();
  }
  root.finish();

  cfg.task.validate();
  cfg.lattice.validate();
  cfg.lattice.silence = cfg.task.silence;
  require(cfg.iterations >= 0 && cfg.ml_iterations >= 0,
          "config: negative iteration count");
  if (cfg.ebw_e < 0.0) throw ConfigError("config: /ebw/E must be >= 0");
  return cfg;
}

std::string default_config_text() {
  return R"({
  "schema_version": 1,
  "task": {
    "vocab_size": 5,
    "phone_count": 5,
    "phones_per_word": [2, 3],
    "feature_dim": 4,
    "frames_per_state": 2.0,
    "train_utterances": 200,
    "test_utterances": 50,
    "mean_separation": 1.5,
    "seed": 7,
    "utterance_words": [2, 3],
    "silence_policy": "optional-boundary",
    "silence_prob": 0.5,
    "bigram_zero_fraction": 0.2,
    "variance_floor_fraction": 0.01
  },
  "lattice": {
    "epsilon": 0.0001,
    "max_len": 3,
    "kappa": 4.0,
    "enumeration_cap": 1000000
  },
  "ebw": {
    "E": 1.0,
    "d_min_doubling": true
  },
  "run": {
    "regime": "fixed",
    "objective": "mmi",
    "iterations": 100,
    "ml_iterations": 20,
    "exact_every": 10,
    "train_a_every": 1,
    "train_bc_every": 1,
    "test_every": 1,
    "log_mpe": false,
    "snapshot_iters": [100],
    "jobs": 0
  }
}
)";
}

}  // namespace mmilab
