// tests/acceptance.cpp
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
//
// End-to-end acceptance suite. Each numbered criterion prints one
// [PASS]/[FAIL] line; the process exits with the number of failures.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "mmilab/analysis.hpp"
#include "mmilab/commands.hpp"
#include "mmilab/config.hpp"
#include "mmilab/criteria.hpp"
#include "mmilab/io.hpp"
#include "mmilab/parallel.hpp"
#include "mmilab/training.hpp"
#include "mmilab/wer.hpp"
#include "oracle_helpers.hpp"

using namespace mmilab;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass,
            const std::string& detail) {
  std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion
            << ": " << name << " -- " << detail << "\n"
            << std::flush;
  if (!pass) ++g_failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

// Mean of `values` over iterations [first, last], 1-based block addressing
// against a row-per-iteration series that includes iteration 0.
std::vector<double> block_means(const std::vector<double>& by_iter,
                                int block) {
  std::vector<double> out;
  for (std::size_t b = 1; b + block - 1 < by_iter.size(); b += block) {
    double acc = 0.0;
    for (std::size_t k = b; k < b + block; ++k) acc += by_iter[k];
    out.push_back(acc / block);
  }
  return out;
}

double spearman_rank_correlation(std::vector<double> a, std::vector<double> b) {
  auto ranks = [](std::vector<double> v) {
    std::vector<int> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](int x, int y) { return v[x] < v[y]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) r[idx[i]] = i;
    return r;
  };
  auto ra = ranks(std::move(a)), rb = ranks(std::move(b));
  const double n = ra.size();
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

struct Lab {
  RunConfig cfg;           // library defaults = default config file
  TaskBundle bundle;
  AcousticModel mle;
  int jobs = default_jobs();

  Lab() : cfg{}, bundle(generate_task(cfg.task)) {
    cfg.lattice.silence = cfg.task.silence;
  }

  RegimeInputs inputs() const {
    RegimeInputs in;
    in.bundle = &bundle;
    in.mle = mle;
    in.lattice = cfg.lattice;
    in.ebw = cfg.ebw_config();
    in.ebw.floor = mle.floor;
    in.plan = cfg.plan;
    in.jobs = jobs;
    return in;
  }
};

}  // namespace

int main() {
  std::cout << "mmilab acceptance suite\n";
  Lab lab;

  // ---- 1. ML monotonicity: 20 Baum-Welch iterations under a minute. ----
  std::vector<double> ml_ll;
  {
    const auto t0 = std::chrono::steady_clock::now();
    AcousticModel model = flat_start(lab.bundle.true_model, lab.bundle.train);
    for (int k = 0; k <= 20; ++k) {
      auto acc = ml_accumulate(model, lab.bundle.train, lab.bundle.lexicon,
                               lab.cfg.task.silence, lab.jobs);
      ml_ll.push_back(acc.log_likelihood / acc.frame_count);
      if (k < 20) model = ml_update(model, acc.stats, model.floor);
    }
    lab.mle = model;
    const double elapsed = seconds_since(t0);
    bool monotone = true;
    for (std::size_t k = 1; k < ml_ll.size(); ++k)
      if (ml_ll[k] < ml_ll[k - 1] - 1e-6) monotone = false;
    report(1, "ML monotonicity", monotone && elapsed < 60.0,
           "per-frame LL " + fmt(ml_ll.front()) + " -> " + fmt(ml_ll.back()) +
               ", " + fmt(elapsed) + " s");
  }

  // ---- 2. Criterion equality at the generation point. ----
  {
    LatticeConfig tight = lab.cfg.lattice;
    tight.epsilon = 1e-6;
    tight.max_len = lab.cfg.task.utterance_words_max;
    TranscriptionScorer scorer(lab.bundle.lexicon, lab.mle,
                               lab.bundle.train_lm, tight.max_len,
                               tight.silence);
    std::vector<WordLattice> wls;
    std::vector<PhoneMarkedLattice> pmls;
    build_lattices(lab.mle, lab.bundle.train, scorer, lab.bundle.lexicon,
                   tight, "mle", lab.jobs, &wls, &pmls);
    auto approx = approx_mmi_criterion(lab.mle, lab.bundle.train, pmls, pmls,
                                       tight.kappa, lab.bundle.lexicon,
                                       tight.silence, lab.jobs);
    auto exact = exact_mmi_criterion(lab.mle, lab.bundle.train, scorer,
                                     tight.kappa, lab.jobs);
    const double gap =
        std::abs(approx.log_mmi_per_frame() - exact.log_mmi_per_frame());
    report(2, "criterion equality at the mle", gap <= 1e-3,
           "|approx - exact| = " + fmt(gap) + " per frame");
  }

  // ---- 3-6 + 10 share one fixed-lattice run. ----
  RegimeResult fixed_run;
  double fixed_elapsed = 0.0;
  {
    const auto t0 = std::chrono::steady_clock::now();
    RegimeInputs in = lab.inputs();
    in.plan.exact_every = 10;
    in.plan.train_a_every = 1;
    in.plan.train_bc_every = 1;
    in.plan.test_every = 1;
    in.snapshot_iters = {100};
    fixed_run = run_regime(Regime::kFixedLattices, 100, in);
    fixed_elapsed = seconds_since(t0);
  }
  const auto& rows = fixed_run.log.rows;

  {  // 3. EBW ascent.
    bool monotone = true;
    double worst = 0.0;
    for (std::size_t k = 1; k < rows.size(); ++k) {
      const double step = rows[k].approx.log_mmi_per_frame() -
                          rows[k - 1].approx.log_mmi_per_frame();
      worst = std::min(worst, step);
      if (step < -1e-6) monotone = false;
    }
    report(3, "EBW ascent on fixed lattices",
           monotone && fixed_elapsed < 600.0,
           "worst step " + fmt(worst) + " per frame, " + fmt(fixed_elapsed) +
               " s for 100 iterations");
  }

  {  // 4. Divergence signature.
    const auto& r10 = rows[10];
    const auto& r100 = rows[100];
    const bool dist_grows = r100.param_dist >= 2.0 * r10.param_dist;
    const bool both_lower =
        r100.approx.num_ll_per_frame() < r10.approx.num_ll_per_frame() &&
        r100.approx.den_ll_per_frame() < r10.approx.den_ll_per_frame();
    const double gap10 = r10.approx.den_ll_per_frame() -
                         r10.approx.num_ll_per_frame();
    const double gap100 = r100.approx.den_ll_per_frame() -
                          r100.approx.num_ll_per_frame();
    const bool gap_halves = gap100 <= 0.5 * gap10;
    report(4, "divergence signature",
           dist_grows && both_lower && gap_halves,
           "dist " + fmt(r10.param_dist) + " -> " + fmt(r100.param_dist) +
               ", num/den gap " + fmt(gap10) + " -> " + fmt(gap100));
  }

  {  // 5. Approximation-gap growth at the exact-oracle checkpoints.
    bool nonneg = true;
    double gap10 = 0.0, gap100 = 0.0;
    for (const auto& r : rows) {
      if (!r.exact) continue;
      const double gap =
          r.approx.log_mmi_per_frame() - r.exact->log_mmi_per_frame();
      if (gap < -1e-9) nonneg = false;
      if (r.iter == 10) gap10 = gap;
      if (r.iter == 100) gap100 = gap;
    }
    report(5, "approximation gap growth",
           nonneg && gap100 >= 5.0 * gap10,
           "gap " + fmt(gap10) + " at k=10, " + fmt(gap100) + " at k=100");
  }

  {  // 6. Method A/B divergence on training data.
    std::vector<double> wer_a, wer_b;
    for (const auto& r : rows) {
      wer_a.push_back(r.train_wer_a.value());
      wer_b.push_back(r.train_wer_b_or_c.value());
    }
    auto blocks_a = block_means(wer_a, 10);
    auto blocks_b = block_means(wer_b, 10);
    bool b_nonincreasing = true;
    for (std::size_t b = 1; b < blocks_b.size(); ++b)
      if (blocks_b[b] > blocks_b[b - 1] + 1e-9) b_nonincreasing = false;
    const double min_a = *std::min_element(blocks_a.begin(), blocks_a.end());
    const bool a_rises = blocks_a.back() > min_a;
    report(6, "method A/B divergence on training data",
           b_nonincreasing && a_rises,
           "B blocks " + fmt(blocks_b.front()) + " -> " + fmt(blocks_b.back()) +
               "; A min block " + fmt(min_a) + ", final block " +
               fmt(blocks_a.back()));
  }

  // ---- 7. Regenerate-all stability. ----
  {
    RegimeInputs in = lab.inputs();
    in.plan.exact_every = 1;
    in.plan.train_a_every = 1;
    in.plan.train_bc_every = 0;
    in.plan.test_every = 0;
    auto regen = run_regime(Regime::kRegenerateAll, 100, in);
    const auto& rr = regen.log.rows;
    double max_dist = 0.0;
    std::vector<double> tail;
    for (const auto& r : rr) {
      max_dist = std::max(max_dist, r.param_dist);
      if (r.iter >= 20) tail.push_back(r.param_dist);
    }
    std::sort(tail.begin(), tail.end());
    const double median = tail[tail.size() / 2];
    const bool bounded = max_dist <= 3.0 * median;

    double worst_gap = 0.0;
    for (const auto& r : rr)
      worst_gap = std::max(worst_gap,
                           std::abs(r.approx.log_mmi_per_frame() -
                                    r.exact->log_mmi_per_frame()));
    const bool tracks_exact = worst_gap <= 1e-3;

    std::vector<double> wer;
    for (const auto& r : rr) wer.push_back(r.train_wer_a.value());
    auto blocks = block_means(wer, 10);
    bool settles = true;
    for (std::size_t b = 1; b < blocks.size(); ++b)
      if (blocks[b] > blocks[b - 1] + 1.0) settles = false;
    report(7, "regenerate-all stability",
           bounded && tracks_exact && settles,
           "max dist " + fmt(max_dist) + " vs median " + fmt(median) +
               ", worst |approx-exact| " + fmt(worst_gap) + ", WER blocks " +
               fmt(blocks.front()) + " -> " + fmt(blocks.back()));
  }

  // ---- 8. E-sweep. ----
  {
    RegimeInputs in = lab.inputs();
    in.plan = EvalPlan{0, 0, 0, 0, false};
    auto sweep = e_sweep({0.5, 1.0, 2.0}, 60, in);
    auto decreases = [](const IterationLog& log, double tol) {
      int n = 0;
      for (std::size_t k = 1; k < log.rows.size(); ++k)
        if (log.rows[k].approx.log_mmi_per_frame() <
            log.rows[k - 1].approx.log_mmi_per_frame() - tol)
          ++n;
      return n;
    };
    const int dec_half = decreases(sweep.at(0.5), 1e-9);
    const int dec_one = decreases(sweep.at(1.0), 1e-6);
    const int dec_two = decreases(sweep.at(2.0), 1e-6);

    std::vector<double> e1, e2;
    for (int k = 5; k <= 30; ++k) {
      e1.push_back(sweep.at(1.0).rows[k].approx.log_mmi_per_frame());
      e2.push_back(sweep.at(2.0).rows[2 * k].approx.log_mmi_per_frame());
    }
    const double rho = spearman_rank_correlation(e1, e2);
    report(8, "E-sweep",
           dec_half >= 1 && dec_one == 0 && dec_two == 0 && rho >= 0.9,
           "decreases: E=0.5 " + std::to_string(dec_half) + ", E=1 " +
               std::to_string(dec_one) + ", E=2 " + std::to_string(dec_two) +
               "; dilation rank corr " + fmt(rho));
  }

  // ---- 9. Oracle equivalences. ----
  {
    using namespace mmilab::testing;
    bool ok = true;
    std::string why = "all oracles agree";

    // Forward-backward vs exhaustive path enumeration.
    {
      auto model = tiny_model(1, {2, 1}, 0.5, true);
      Lexicon lex{{"a", "b"}, {{0, 1}, {1}}};
      std::mt19937_64 rng(2024);
      std::normal_distribution<double> gauss(0.0, 1.5);
      for (int trial = 0; trial < 12 && ok; ++trial) {
        Transcription t{trial % 2 == 0 ? std::vector<int>{0}
                                       : std::vector<int>{1, 0}};
        auto g = compile_utterance_graph(lex, model, t,
                                         SilencePolicy::kOptionalBoundary);
        FrameSequence frames;
        for (int i = 0; i < 5 + trial % 3; ++i) frames.push_back({gauss(rng)});
        auto paths = enumerate_paths(model, g, frames, 1.0, 500);
        if (paths.empty()) continue;
        const double total = forward_total(model, g, frames, 1.0);
        if (std::abs(total - oracle_log_total(paths)) > 1e-9) {
          ok = false;
          why = "forward-backward disagrees with enumeration";
        }
      }
    }
    // Edit distance vs exhaustive scripts.
    if (ok) {
      std::mt19937_64 rng(77);
      std::uniform_int_distribution<int> sym(0, 2);
      auto check_pair = [&](const std::vector<int>& h,
                            const std::vector<int>& r) {
        auto fast = edit_distance(h, r);
        auto slow = testing::oracle_edit_distance(h, r);
        return fast.total() == slow.total() && fast.sub == slow.sub &&
               fast.del == slow.del && fast.ins == slow.ins;
      };
      std::vector<std::vector<int>> shorts{{}};
      for (int len = 1; len <= 3; ++len) {
        std::vector<std::vector<int>> next;
        for (const auto& s : shorts)
          if (static_cast<int>(s.size()) == len - 1)
            for (int a = 0; a < 3; ++a) {
              auto t = s;
              t.push_back(a);
              next.push_back(t);
            }
        shorts.insert(shorts.end(), next.begin(), next.end());
      }
      for (const auto& h : shorts)
        for (const auto& r : shorts)
          if (ok && !check_pair(h, r)) {
            ok = false;
            why = "edit distance disagrees with script search";
          }
      for (int trial = 0; trial < 400 && ok; ++trial) {
        std::vector<int> h(4 + trial % 2), r(4 + (trial / 2) % 2);
        for (int& x : h) x = sym(rng);
        for (int& x : r) x = sym(rng);
        if (!check_pair(h, r)) {
          ok = false;
          why = "edit distance disagrees with script search";
        }
      }
    }
    // Eigen solver vs closed forms.
    if (ok) {
      std::mt19937_64 rng(99);
      std::normal_distribution<double> gauss(0.0, 2.0);
      for (int trial = 0; trial < 60 && ok; ++trial) {
        const double a = gauss(rng), b = gauss(rng), c = gauss(rng);
        auto eig = jacobi_eigen(Matrix{{a, b}, {b, c}});
        auto [lo, hi] = testing::eigen2x2(a, b, c);
        if (std::abs(eig.values[0] - lo) > 1e-10 ||
            std::abs(eig.values[1] - hi) > 1e-10) {
          ok = false;
          why = "2x2 eigen mismatch";
        }
        Matrix m(3, std::vector<double>(3));
        for (int i = 0; i < 3; ++i)
          for (int j = i; j < 3; ++j) m[i][j] = m[j][i] = gauss(rng);
        auto e3 = jacobi_eigen(m);
        auto expect = testing::eigen3x3(m);
        for (int k = 0; k < 3; ++k)
          if (std::abs(e3.values[k] - expect[k]) > 1e-10) {
            ok = false;
            why = "3x3 eigen mismatch";
          }
      }
    }
    // EBW degenerates to the ML update.
    if (ok) {
      auto acc = ml_accumulate(lab.mle, lab.bundle.train, lab.bundle.lexicon,
                               lab.cfg.task.silence, lab.jobs);
      SufficientStats zero(lab.mle.num_states(), lab.mle.dim);
      EbwConfig cfg;
      cfg.E = 0.0;
      auto via_ebw = ebw_update(lab.mle, acc.stats, zero, cfg);
      auto via_ml = ml_update(lab.mle, acc.stats, lab.mle.floor);
      for (int s = 0; s < lab.mle.num_states() && ok; ++s)
        for (int i = 0; i < lab.mle.dim; ++i)
          if (std::abs(via_ebw.states[s].mean[i] - via_ml.states[s].mean[i]) >
                  1e-12 ||
              std::abs(via_ebw.states[s].var[i] - via_ml.states[s].var[i]) >
                  1e-12) {
            ok = false;
            why = "EBW does not reduce to the ML update";
          }
    }
    report(9, "oracle equivalences", ok, why);
  }

  // ---- 10. Analysis directionality on the k=100 snapshot. ----
  {
    const auto& snap = fixed_run.snapshots.at(100);
    auto ra = mean_scatter(lab.mle);
    auto rb = mean_scatter(snap);
    auto vv = variance_volume_change(lab.mle, snap);
    const bool volume_up = rb.log_volume > ra.log_volume;
    const bool c_down = ra.elongation && rb.elongation &&
                        *rb.elongation < *ra.elongation;
    const bool vj_negative = vv.fraction_negative >= 0.5;
    const int comps = lab.mle.num_states() * lab.mle.dim;
    const int floored = count_floored(snap);
    const bool few_floored = floored < 0.01 * comps;
    report(10, "analysis directionality",
           volume_up && c_down && vj_negative && few_floored,
           "volume ratio " + fmt(std::exp(rb.log_volume - ra.log_volume)) +
               ", c " + fmt(ra.elongation.value_or(-1)) + " -> " +
               fmt(rb.elongation.value_or(-1)) + ", V_j<0 " +
               fmt(vv.fraction_negative) + ", floored " +
               std::to_string(floored) + "/" + std::to_string(comps));
  }

  // ---- 11. MPE pathology (directional). ----
  {
    RegimeInputs in = lab.inputs();
    in.objective = Objective::kMpe;
    in.ebw.E = 2.0;  // the standard MPE setting
    in.plan = EvalPlan{0, 0, 1, 0, true};
    auto mpe_run = run_regime(Regime::kFixedLattices, 60, in);
    const auto& mr = mpe_run.log.rows;
    std::vector<double> crit, wer;
    for (const auto& r : mr) {
      crit.push_back(r.mpe_criterion.value());
      wer.push_back(r.test_wer.value());
    }
    auto crit_blocks = block_means(crit, 10);
    const bool crit_up = crit_blocks.back() > crit.front();
    int argmin = 0;
    for (std::size_t k = 0; k < wer.size(); ++k)
      if (wer[k] < wer[argmin]) argmin = static_cast<int>(k);
    auto wer_blocks = block_means(wer, 10);
    const double min_block =
        *std::min_element(wer_blocks.begin(), wer_blocks.end());
    const bool degrades = wer_blocks.back() > min_block;
    report(11, "MPE pathology",
           crit_up && argmin < 30 && degrades,
           "criterion " + fmt(crit.front()) + " -> block " +
               fmt(crit_blocks.back()) + ", test WER min at k=" +
               std::to_string(argmin) + ", final block " +
               fmt(wer_blocks.back()) + " vs min block " + fmt(min_block));
  }

  // ---- 12. Reproducibility of every command. ----
  {
    const fs::path root =
        fs::temp_directory_path() /
        ("mmilab-acceptance-" + std::to_string(std::random_device{}()));
    fs::create_directories(root);
    bool ok = true;
    std::string why = "all outputs hash-identical";
    try {
      write_text_file(root / "cfg.json", R"({
  "schema_version": 1,
  "task": {"vocab_size": 4, "phone_count": 4, "train_utterances": 12,
            "test_utterances": 3, "seed": 7},
  "lattice": {"epsilon": 0.001, "max_len": 3, "kappa": 4.0},
  "run": {"regime": "fixed", "iterations": 4, "ml_iterations": 5,
           "exact_every": 2, "snapshot_iters": [4]}
}
)");
      auto hash_dir = [](const fs::path& dir) {
        std::vector<fs::path> files;
        for (const auto& e : fs::recursive_directory_iterator(dir))
          if (e.is_regular_file()) files.push_back(e.path());
        std::sort(files.begin(), files.end());
        std::string acc;
        for (const auto& f : files)
          acc += f.filename().string() + ":" + file_hash_hex(f) + "\n";
        return acc;
      };
      for (const char* side : {"x", "y"}) {
        const fs::path base = root / side;
        cmd_gen(root / "cfg.json", base / "bundle");
        cmd_train_ml(base / "bundle", 5, base / "bundle");
        cmd_run_regime(base / "bundle", root / "cfg.json", "", base / "run");
        cmd_analyze(base / "bundle" / "mle.json",
                    base / "run" / "model_iter_4.json", base / "analysis");
      }
      for (const char* sub : {"bundle", "run", "analysis"}) {
        if (hash_dir(root / "x" / sub) != hash_dir(root / "y" / sub)) {
          ok = false;
          why = std::string("directory '") + sub + "' differs between runs";
        }
      }
    } catch (const std::exception& e) {
      ok = false;
      why = e.what();
    }
    fs::remove_all(root);
    report(12, "reproducibility", ok, why);
  }

  std::cout << (g_failures == 0 ? "all criteria passed\n"
                                : std::to_string(g_failures) +
                                      " criterion(s) failed\n");
  return g_failures;
}
