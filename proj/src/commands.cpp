// src/commands.cpp
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

#include "mmilab/commands.hpp"

#include <functional>
#include <iostream>

#include "mmilab/analysis.hpp"
#include "mmilab/io.hpp"
#include "mmilab/parallel.hpp"
#include "mmilab/svg.hpp"

namespace mmilab {

namespace fs = std::filesystem;

namespace {

int effective_jobs(int cfg_jobs, const std::optional<int>& ov) {
  if (ov && *ov > 0) return *ov;
  if (cfg_jobs > 0) return cfg_jobs;
  return default_jobs();
}

void apply_overrides(RunConfig* cfg, const RunOverrides& ov) {
  if (ov.seed) cfg->task.seed = *ov.seed;
  if (ov.iters) cfg->iterations = *ov.iters;
  if (ov.regime) cfg->regime = regime_from_string(*ov.regime);
  if (ov.ebw_e) cfg->ebw_e = *ov.ebw_e;
}

}  // namespace

void cmd_gen(const fs::path& config_path, const fs::path& out,
             const RunOverrides& ov) {
  RunConfig cfg = load_run_config(config_path);
  apply_overrides(&cfg, ov);
  TaskBundle bundle = generate_task(cfg.task);
  save_task_bundle(bundle, out);
  std::cerr << "gen: wrote bundle to " << out.string() << " ("
            << bundle.train.total_frames() << " train frames, "
            << bundle.test.total_frames() << " test frames)\n";
}

void cmd_train_ml(const fs::path& bundle_dir, int iters, const fs::path& out,
                  int jobs) {
  require(iters >= 0, "train-ml: negative iteration count");
  TaskBundle bundle = load_task_bundle(bundle_dir);
  const int j = jobs > 0 ? jobs : default_jobs();
  fs::create_directories(out);

  AcousticModel model = flat_start(bundle.true_model, bundle.train);
  std::vector<std::pair<int, double>> log;
  for (int k = 0; k < iters; ++k) {
    MlAccumulation acc = ml_accumulate(model, bundle.train, bundle.lexicon,
                                       bundle.spec.silence, j);
    if (acc.frame_count == 0)
      throw TrainingError("train-ml: no alignable utterances");
    log.emplace_back(k, acc.log_likelihood / acc.frame_count);
    model = ml_update(model, acc.stats, model.floor);
  }
  // Likelihood of the final model, without an update.
  MlAccumulation fin = ml_accumulate(model, bundle.train, bundle.lexicon,
                                     bundle.spec.silence, j);
  if (fin.frame_count == 0)
    throw TrainingError("train-ml: no alignable utterances");
  log.emplace_back(iters, fin.log_likelihood / fin.frame_count);

  save_model(model, out / "mle.json");
  save_ml_log(log, out / "ml_log.csv");
  std::cerr << "train-ml: " << iters << " iteration(s), final per-frame LL "
            << log.back().second << "\n";
}

void cmd_run_regime(const fs::path& bundle_dir, const fs::path& config_path,
                    const fs::path& model_path, const fs::path& out,
                    const RunOverrides& ov) {
  RunConfig cfg = load_run_config(config_path);
  apply_overrides(&cfg, ov);
  TaskBundle bundle = load_task_bundle(bundle_dir);
  cfg.lattice.silence = bundle.spec.silence;
  fs::create_directories(out);

  RegimeInputs in;
  in.bundle = &bundle;
  in.mle = load_model(model_path.empty() ? bundle_dir / "mle.json"
                                         : model_path);
  in.lattice = cfg.lattice;
  in.ebw = cfg.ebw_config();
  in.ebw.floor = in.mle.floor;
  in.plan = cfg.plan;
  in.objective = cfg.objective;
  in.snapshot_iters = cfg.snapshot_iters;
  in.jobs = effective_jobs(cfg.jobs, ov.jobs);

  RegimeResult result = run_regime(cfg.regime, cfg.iterations, in);

  save_iteration_log(result.log, out / "iteration_log.csv");
  save_lattices(result.initial_pmls, bundle.lexicon, in.mle,
                out / "lattices_train.lat");
  save_model(result.final_model, out / "model_final.json");
  for (const auto& [k, m] : result.snapshots)
    save_model(m, out / ("model_iter_" + std::to_string(k) + ".json"));

  // Quick-look figures; the CSV is the ground truth.
  PlotSeries approx{"approximate log MMI / frame", {}};
  PlotSeries exact{"exact log MMI / frame", {}};
  PlotSeries num{"numerator LL / frame", {}}, den{"denominator LL / frame", {}};
  PlotSeries wa{"train WER, method A", {}}, wb{"train WER, method B/C", {}},
      wt{"test WER", {}};
  PlotSeries mpe{"approximate MPE criterion", {}};
  for (const auto& r : result.log.rows) {
    const double x = r.iter;
    approx.points.emplace_back(x, r.approx.log_mmi_per_frame());
    num.points.emplace_back(x, r.approx.num_ll_per_frame());
    den.points.emplace_back(x, r.approx.den_ll_per_frame());
    if (r.exact) exact.points.emplace_back(x, r.exact->log_mmi_per_frame());
    if (r.train_wer_a) wa.points.emplace_back(x, *r.train_wer_a);
    if (r.train_wer_b_or_c) wb.points.emplace_back(x, *r.train_wer_b_or_c);
    if (r.test_wer) wt.points.emplace_back(x, *r.test_wer);
    if (r.mpe_criterion) mpe.points.emplace_back(x, *r.mpe_criterion);
  }
  std::vector<PlotSeries> crit{approx};
  if (!exact.points.empty()) crit.push_back(exact);
  write_line_plot(out / "criterion.svg", "Model selection criterion",
                  "iteration", "log criterion / frame", crit);
  write_line_plot(out / "numden.svg", "Numerator and denominator",
                  "iteration", "log-likelihood / frame", {num, den});
  std::vector<PlotSeries> wers;
  for (const auto& s : {wa, wb, wt})
    if (!s.points.empty()) wers.push_back(s);
  if (!wers.empty())
    write_line_plot(out / "wer.svg", "Word error rate", "iteration", "WER (%)",
                    wers);
  if (!mpe.points.empty())
    write_line_plot(out / "mpe.svg", "Approximate MPE criterion", "iteration",
                    "expected phone accuracy", {mpe});
  std::cerr << "run: " << cfg.iterations << " iteration(s) under '"
            << to_string(cfg.regime) << "' written to " << out.string()
            << "\n";
}

void cmd_analyze(const fs::path& model_a_path, const fs::path& model_b_path,
                 const fs::path& out) {
  AcousticModel a = load_model(model_a_path);
  AcousticModel b = load_model(model_b_path);
  require(a.same_architecture(b), "analyze: architecture mismatch");
  fs::create_directories(out);

  const ScatterReport ra = mean_scatter(a);
  const ScatterReport rb = mean_scatter(b);
  const VarianceVolumeReport vv = variance_volume_change(a, b);

  ordered_json j;
  j["format"] = "mmi-lab-analysis";
  j["version"] = 1;
  auto scatter_json = [](const ScatterReport& r) {
    ordered_json s;
    s["log_volume"] = r.log_volume == kLogZero ? ordered_json(nullptr)
                                               : ordered_json(r.log_volume);
    s["elongation"] =
        r.elongation ? ordered_json(*r.elongation) : ordered_json(nullptr);
    s["eigenvalues"] = r.eigenvalues;
    s["centroid"] = r.centroid;
    return s;
  };
  j["model_a"] = scatter_json(ra);
  j["model_b"] = scatter_json(rb);
  j["model_a"]["floored_components"] = count_floored(a);
  j["model_b"]["floored_components"] = count_floored(b);
  if (ra.log_volume != kLogZero && rb.log_volume != kLogZero) {
    j["volume_log_ratio"] = rb.log_volume - ra.log_volume;
    j["volume_ratio"] = std::exp(rb.log_volume - ra.log_volume);
  } else {
    j["volume_log_ratio"] = nullptr;
    j["volume_ratio"] = nullptr;
  }
  j["vj_fraction_negative"] = vv.fraction_negative;
  write_text_file(out / "analysis.json", j.dump(2) + "\n");

  auto dump_projection = [&](const AcousticModel& m, const ScatterReport& r,
                             const std::string& stem) {
    const auto pts = project_means(m, r.eigenvectors.front(),
                                   r.eigenvectors.back(), r.centroid);
    std::string csv = "state,u_low,u_high\n";
    PlotSeries series{stem, {}};
    for (std::size_t s = 0; s < pts.size(); ++s) {
      csv += std::to_string(s) + "," + format_double(pts[s][0]) + "," +
             format_double(pts[s][1]) + "\n";
      series.points.emplace_back(pts[s][0], pts[s][1]);
    }
    write_text_file(out / (stem + ".csv"), csv);
    write_scatter_plot(out / (stem + ".svg"),
                       "State means on extreme eigenvectors",
                       "smallest-eigenvalue direction",
                       "largest-eigenvalue direction", {series});
  };
  dump_projection(a, ra, "projection_a");
  dump_projection(b, rb, "projection_b");

  std::string vj_csv = "state,v\n";
  for (std::size_t s = 0; s < vv.v.size(); ++s)
    vj_csv += std::to_string(s) + "," + format_double(vv.v[s]) + "\n";
  write_text_file(out / "variance_volume.csv", vj_csv);
  write_histogram(out / "variance_volume.svg",
                  "Per-state variance volume change", "V_j", vv.v, 12);
  std::cerr << "analyze: wrote reports to " << out.string() << "\n";
}

int run_cli_action(const std::function<void()>& action) {
  try {
    action();
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const TrainingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTraining;
  } catch (const ReferenceStarvedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStarved;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace mmilab
