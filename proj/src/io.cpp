// src/io.cpp
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

#include "mmilab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mmilab {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

ordered_json log_to_json(double v) {
  if (v == kLogZero) return nullptr;
  return v;
}

double log_from_json(const ordered_json& j) {
  if (j.is_null()) return kLogZero;
  return j.get<double>();
}

ordered_json log_vec_to_json(const std::vector<double>& v) {
  ordered_json out = ordered_json::array();
  for (double x : v) out.push_back(log_to_json(x));
  return out;
}

std::vector<double> log_vec_from_json(const ordered_json& j) {
  std::vector<double> out;
  for (const auto& x : j) out.push_back(log_from_json(x));
  return out;
}

ordered_json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError("cannot parse " + path.string() + ": " + e.what());
  }
  return j;
}

void write_json_file(const ordered_json& j, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed on " + path.string());
}

void expect_format(const ordered_json& j, const std::string& format,
                   int version, const fs::path& path) {
  if (!j.contains("format") || j["format"] != format ||
      !j.contains("version") || j["version"].get<int>() != version)
    throw IoError(path.string() + ": expected " + format + " v" +
                  std::to_string(version));
}

}  // namespace

ordered_json model_to_json(const AcousticModel& model) {
  ordered_json j;
  j["format"] = "mmi-lab-model";
  j["version"] = 1;
  j["dim"] = model.dim;
  j["phones"] = model.phones;
  j["silence_phone"] = model.silence_phone;
  j["log_silence"] = log_to_json(model.log_silence);
  j["log_no_silence"] = log_to_json(model.log_no_silence);
  j["floor"] = model.floor;
  ordered_json topos = ordered_json::array();
  for (const auto& t : model.topologies) {
    ordered_json tj;
    tj["states"] = t.state_ids;
    tj["log_self"] = log_vec_to_json(t.log_self);
    tj["log_next"] = log_vec_to_json(t.log_next);
    topos.push_back(tj);
  }
  j["topologies"] = topos;
  ordered_json states = ordered_json::array();
  for (const auto& g : model.states) {
    ordered_json s;
    s["mean"] = g.mean;
    s["var"] = g.var;
    states.push_back(s);
  }
  j["states"] = states;
  return j;
}

AcousticModel model_from_json(const ordered_json& j) {
  AcousticModel m;
  m.dim = j.at("dim").get<int>();
  m.phones = j.at("phones").get<std::vector<std::string>>();
  m.silence_phone = j.at("silence_phone").get<int>();
  m.log_silence = log_from_json(j.at("log_silence"));
  m.log_no_silence = log_from_json(j.at("log_no_silence"));
  m.floor = j.at("floor").get<std::vector<double>>();
  for (const auto& tj : j.at("topologies")) {
    PhoneTopology t;
    t.state_ids = tj.at("states").get<std::vector<int>>();
    t.log_self = log_vec_from_json(tj.at("log_self"));
    t.log_next = log_vec_from_json(tj.at("log_next"));
    m.topologies.push_back(std::move(t));
  }
  for (const auto& sj : j.at("states")) {
    DiagonalGaussian g;
    g.mean = sj.at("mean").get<std::vector<double>>();
    g.var = sj.at("var").get<std::vector<double>>();
    m.states.push_back(std::move(g));
  }
  m.validate();
  return m;
}

void save_model(const AcousticModel& model, const fs::path& path) {
  write_json_file(model_to_json(model), path);
}

AcousticModel load_model(const fs::path& path) {
  ordered_json j = read_json_file(path);
  expect_format(j, "mmi-lab-model", 1, path);
  return model_from_json(j);
}

namespace {

ordered_json lm_to_json(const BigramLm& lm) {
  ordered_json j;
  j["vocab"] = lm.vocab;
  j["log_begin"] = log_vec_to_json(lm.log_begin);
  ordered_json rows = ordered_json::array();
  for (const auto& r : lm.log_trans) rows.push_back(log_vec_to_json(r));
  j["log_trans"] = rows;
  j["log_end"] = log_vec_to_json(lm.log_end);
  return j;
}

BigramLm lm_from_json(const ordered_json& j) {
  BigramLm lm;
  lm.vocab = j.at("vocab").get<int>();
  lm.log_begin = log_vec_from_json(j.at("log_begin"));
  for (const auto& r : j.at("log_trans"))
    lm.log_trans.push_back(log_vec_from_json(r));
  lm.log_end = log_vec_from_json(j.at("log_end"));
  lm.validate();
  return lm;
}

ordered_json corpus_to_json(const Corpus& corpus) {
  ordered_json j;
  j["format"] = "mmi-lab-corpus";
  j["version"] = 1;
  ordered_json utts = ordered_json::array();
  for (const auto& u : corpus.utterances) {
    ordered_json uj;
    uj["id"] = u.id;
    uj["reference"] = u.reference.words;
    uj["frames"] = u.frames;
    utts.push_back(uj);
  }
  j["utterances"] = utts;
  return j;
}

Corpus corpus_from_json(const ordered_json& j) {
  Corpus c;
  for (const auto& uj : j.at("utterances")) {
    Utterance u;
    u.id = uj.at("id").get<std::string>();
    u.reference.words = uj.at("reference").get<std::vector<int>>();
    u.frames = uj.at("frames").get<FrameSequence>();
    c.utterances.push_back(std::move(u));
  }
  return c;
}

ordered_json spec_to_json(const TaskSpec& s) {
  ordered_json j;
  j["vocab_size"] = s.vocab_size;
  j["phone_count"] = s.phone_count;
  j["phones_per_word"] = {s.phones_per_word_min, s.phones_per_word_max};
  j["feature_dim"] = s.feature_dim;
  j["frames_per_state"] = s.frames_per_state;
  j["train_utterances"] = s.train_utterances;
  j["test_utterances"] = s.test_utterances;
  j["mean_separation"] = s.mean_separation;
  j["seed"] = s.seed;
  j["utterance_words"] = {s.utterance_words_min, s.utterance_words_max};
  j["silence_policy"] = to_string(s.silence);
  j["silence_prob"] = s.silence_prob;
  j["bigram_zero_fraction"] = s.bigram_zero_fraction;
  j["variance_floor_fraction"] = s.variance_floor_fraction;
  return j;
}

TaskSpec spec_from_json(const ordered_json& j) {
  TaskSpec s;
  s.vocab_size = j.at("vocab_size").get<int>();
  s.phone_count = j.at("phone_count").get<int>();
  s.phones_per_word_min = j.at("phones_per_word")[0].get<int>();
  s.phones_per_word_max = j.at("phones_per_word")[1].get<int>();
  s.feature_dim = j.at("feature_dim").get<int>();
  s.frames_per_state = j.at("frames_per_state").get<double>();
  s.train_utterances = j.at("train_utterances").get<int>();
  s.test_utterances = j.at("test_utterances").get<int>();
  s.mean_separation = j.at("mean_separation").get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.utterance_words_min = j.at("utterance_words")[0].get<int>();
  s.utterance_words_max = j.at("utterance_words")[1].get<int>();
  s.silence = silence_policy_from_string(j.at("silence_policy"));
  s.silence_prob = j.at("silence_prob").get<double>();
  s.bigram_zero_fraction = j.at("bigram_zero_fraction").get<double>();
  s.variance_floor_fraction = j.at("variance_floor_fraction").get<double>();
  return s;
}

}  // namespace

void save_task_bundle(const TaskBundle& bundle, const fs::path& dir) {
  fs::create_directories(dir);
  ordered_json task;
  task["format"] = "mmi-lab-task";
  task["version"] = 1;
  task["spec"] = spec_to_json(bundle.spec);
  ordered_json lex;
  lex["words"] = bundle.lexicon.words;
  lex["pronunciations"] = bundle.lexicon.entries;
  task["lexicon"] = lex;
  task["train_lm"] = lm_to_json(bundle.train_lm);
  task["test_lm"] = lm_to_json(bundle.test_lm);
  write_json_file(task, dir / "task.json");
  save_model(bundle.true_model, dir / "true_model.json");
  write_json_file(corpus_to_json(bundle.train), dir / "corpus_train.json");
  write_json_file(corpus_to_json(bundle.test), dir / "corpus_test.json");
  write_manifest({dir / "task.json", dir / "true_model.json",
                  dir / "corpus_train.json", dir / "corpus_test.json"},
                 dir / "manifest.json");
}

TaskBundle load_task_bundle(const fs::path& dir) {
  TaskBundle bundle;
  ordered_json task = read_json_file(dir / "task.json");
  expect_format(task, "mmi-lab-task", 1, dir / "task.json");
  bundle.spec = spec_from_json(task.at("spec"));
  bundle.lexicon.words =
      task.at("lexicon").at("words").get<std::vector<std::string>>();
  bundle.lexicon.entries = task.at("lexicon")
                               .at("pronunciations")
                               .get<std::vector<std::vector<int>>>();
  bundle.train_lm = lm_from_json(task.at("train_lm"));
  bundle.test_lm = lm_from_json(task.at("test_lm"));
  bundle.true_model = load_model(dir / "true_model.json");
  ordered_json train = read_json_file(dir / "corpus_train.json");
  expect_format(train, "mmi-lab-corpus", 1, dir / "corpus_train.json");
  bundle.train = corpus_from_json(train);
  ordered_json test = read_json_file(dir / "corpus_test.json");
  expect_format(test, "mmi-lab-corpus", 1, dir / "corpus_test.json");
  bundle.test = corpus_from_json(test);
  return bundle;
}

void save_lattices(const std::vector<PhoneMarkedLattice>& pmls,
                   const Lexicon& lex, const AcousticModel& model,
                   const fs::path& path) {
  std::ostringstream out;
  out << "#mmi-lab-lattice v1\n";
  for (const auto& pml : pmls) {
    out << "UTT " << pml.utterance_id << " " << pml.num_frames << "\n";
    for (const auto& e : pml.entries) {
      out << "ENTRY " << format_double(e.lm_log_score);
      for (int w : e.words.words) out << " " << lex.words[w];
      out << "\n";
      for (const auto& a : e.arcs)
        out << "ARC " << model.phones[a.phone] << " " << a.start << " "
            << a.end << "\n";
    }
  }
  write_text_file(path, out.str());
}

std::vector<PhoneMarkedLattice> load_lattices(const fs::path& path,
                                              const Lexicon& lex,
                                              const AcousticModel& model,
                                              const Corpus* corpus) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "#mmi-lab-lattice v1")
    throw IoError(path.string() + ": bad lattice header");

  auto word_id = [&](const std::string& s) {
    for (int w = 0; w < lex.size(); ++w)
      if (lex.words[w] == s) return w;
    throw IoError(path.string() + ": unknown word " + s);
  };
  auto phone_id = [&](const std::string& s) {
    for (std::size_t p = 0; p < model.phones.size(); ++p)
      if (model.phones[p] == s) return static_cast<int>(p);
    throw IoError(path.string() + ": unknown phone " + s);
  };

  std::vector<PhoneMarkedLattice> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "UTT") {
      PhoneMarkedLattice pml;
      ls >> pml.utterance_id >> pml.num_frames;
      out.push_back(std::move(pml));
    } else if (tag == "ENTRY") {
      if (out.empty()) throw IoError(path.string() + ": ENTRY before UTT");
      PhoneMarkedLattice::Entry e;
      ls >> e.lm_log_score;
      std::string w;
      while (ls >> w) e.words.words.push_back(word_id(w));
      out.back().entries.push_back(std::move(e));
    } else if (tag == "ARC") {
      if (out.empty() || out.back().entries.empty())
        throw IoError(path.string() + ": ARC before ENTRY");
      std::string p;
      PhoneArc a;
      ls >> p >> a.start >> a.end;
      a.phone = phone_id(p);
      out.back().entries.back().arcs.push_back(a);
    } else {
      throw IoError(path.string() + ": unknown line tag " + tag);
    }
  }
  // Rebuild word positions from the lexicon expansion, and reference
  // indices from the corpus when available.
  for (auto& pml : out) {
    for (auto& e : pml.entries) {
      std::size_t pos = 0;
      for (int w = 0; w < e.words.length(); ++w)
        for (int phone : lex.entries[e.words.words[w]]) {
          while (pos < e.arcs.size() &&
                 e.arcs[pos].phone == model.silence_phone)
            ++pos;
          if (pos < e.arcs.size() && e.arcs[pos].phone == phone)
            e.arcs[pos++].word_pos = w;
        }
    }
  }
  if (corpus) {
    require(corpus->size() == static_cast<int>(out.size()),
            "load_lattices: corpus size mismatch");
    for (int i = 0; i < corpus->size(); ++i) {
      for (std::size_t e = 0; e < out[i].entries.size(); ++e)
        if (out[i].entries[e].words == corpus->utterances[i].reference)
          out[i].reference_index = static_cast<int>(e);
      require(out[i].reference_index >= 0, "load_lattices: reference missing");
    }
  }
  return out;
}

void save_iteration_log(const IterationLog& log, const fs::path& path) {
  std::ostringstream out;
  out << "iter,num_ll_pf,den_ll_pf,log_mmi_pf,exact_log_mmi_pf,param_dist,"
         "floored_count,train_wer_a,train_wer_b_or_c,test_wer,mpe_criterion\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  for (const auto& r : log.rows) {
    out << r.iter << "," << format_double(r.approx.num_ll_per_frame()) << ","
        << format_double(r.approx.den_ll_per_frame()) << ","
        << format_double(r.approx.log_mmi_per_frame()) << ",";
    if (r.exact) out << format_double(r.exact->log_mmi_per_frame());
    out << "," << format_double(r.param_dist) << "," << r.floored_count << ","
        << opt(r.train_wer_a) << "," << opt(r.train_wer_b_or_c) << ","
        << opt(r.test_wer) << "," << opt(r.mpe_criterion) << "\n";
  }
  write_text_file(path, out.str());
}

void save_ml_log(const std::vector<std::pair<int, double>>& rows,
                 const fs::path& path) {
  std::ostringstream out;
  out << "iter,log_likelihood_per_frame\n";
  for (const auto& [it, ll] : rows)
    out << it << "," << format_double(ll) << "\n";
  write_text_file(path, out.str());
}

std::string file_hash_hex(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
    h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
  char hex[20];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(h));
  return hex;
}

void write_manifest(const std::vector<fs::path>& files,
                    const fs::path& manifest_path) {
  ordered_json j;
  j["format"] = "mmi-lab-manifest";
  j["version"] = 1;
  ordered_json entries;
  for (const auto& f : files) entries[f.filename().string()] = file_hash_hex(f);
  j["files"] = entries;
  write_json_file(j, manifest_path);
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed on " + path.string());
}

}  // namespace mmilab
