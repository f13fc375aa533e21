// Copyright 2026 The hrtf-forge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <ostream>

#include "CLI11.hpp"
#include "hrtf_forge/distance.hpp"
#include "hrtf_forge/error.hpp"
#include "hrtf_forge/log.hpp"
#include "hrtf_forge/mesh_io.hpp"
#include "hrtf_forge/parallel.hpp"
#include "hrtf_forge/pipeline.hpp"
#include "hrtf_forge/topology.hpp"

namespace hforge::pipeline {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string counts(const TriangleMesh& m) {
  return std::to_string(m.vertices.size()) + " vertices, " + std::to_string(m.faces.size()) + " faces";
}

// Options shared by all subcommands plus per-command arguments.
struct Args {
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string config, in, out, mesh, manifest, model, truth, loss;
  std::vector<std::string> tests, refs, labels;
  std::optional<int> levels;
  bool sphere_fixture = false, oracle = false;
};

PipelineConfig config_for(const Args& a, bool required) {
  PipelineConfig cfg;
  if (!a.config.empty()) cfg = load_config(a.config);
  else if (required) throw ConfigError("--config is required for this command");
  if (a.seed) {
    // --seed overrides the document.
    cfg.seed = *a.seed;
    if (cfg.model) cfg.model->train.seed = *a.seed;
    if (cfg.bem) cfg.bem->acoustic.chief_seed = *a.seed;
  }
  return cfg;
}

template <class T>
const T& section(const std::optional<T>& s, const char* name) {
  if (!s) throw ConfigError(std::string("config: missing key ") + name);
  return *s;
}

int cmd_validate(const Args& a, std::ostream& out) {
  const PipelineConfig cfg = config_for(a, false);
  const ValidationReport r = validate(load_mesh(a.in, cfg.io.unit_scale));
  out << r.to_text();
  if (!r.is_closed_genus0()) {
    log::warn("validate", "mesh is not a closed genus-0 manifold",
              "boundary_edges=" + std::to_string(r.boundary_edge_count));
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_prep(const Args& a, std::ostream& out) {
  const PipelineConfig cfg = config_for(a, true);
  const PrepSection& p = section(cfg.prep, "prep");
  if (std::filesystem::path(a.out).extension() != ".obj") throw ConfigError("prep: output must be an .obj file");
  std::string stage = "load";
  try {
    TriangleMesh m = load_mesh(a.in, cfg.io.unit_scale);
    out << "input: " << counts(m) << "\n";
    stage = "cleanup";
    m = cleanup(m, p.weld_tol, p.area_eps);
    out << "cleanup: " << counts(m) << "\n";
    if (!cfg.io.reference_mesh.empty()) {
      stage = "align";
      const IcpResult icp = icp_align(m, load_mesh(cfg.io.reference_mesh, cfg.io.unit_scale), p.icp_max_iters, p.icp_eps);
      m = apply_transform(m, icp.transform);
      out << "align: rms " << fmt("%.6g", icp.rms) << " m after " << icp.iterations << " iterations\n";
    }
    stage = "behead";
    m = behead(m, p.cut_plane);
    out << "behead: " << counts(m) << "\n";
    if (p.grade) {
      stage = "grade";
      m = grade(m, p.grading);
      out << "grade: " << counts(m) << "\n";
    }
    stage = "label";
    m = label_regions(m, p.ear_markers);
    std::size_t left = 0, right = 0;
    for (Region r : m.labels) left += r == Region::LeftEar, right += r == Region::RightEar;
    out << "label: " << left << " left-ear faces, " << right << " right-ear faces\n";
    stage = "write";
    save_obj(m, a.out);
  } catch (const Error& e) {
    log::error("prep", "stage failed", "stage=" + stage);
    throw;
  }
  return kExitOk;
}

struct LoadedPair {
  std::string id;
  TriangleMesh coarse, truth;
};

std::vector<LoadedPair> load_pairs(const DatasetManifest& m, Split split, double unit_scale) {
  std::vector<LoadedPair> pairs;
  for (const ManifestEntry& e : m.subjects) {
    if (e.split != split || !e.high_res_mesh) continue;
    LoadedPair p{e.id, load_mesh(e.low_res_mesh, unit_scale), load_mesh(*e.high_res_mesh, unit_scale)};
    if (!validate(p.coarse).is_closed_genus0() || !validate(p.truth).is_closed_genus0()) {
      log::warn("train", "pair skipped: not closed genus 0", "id=" + e.id);
      continue;
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

int cmd_train(const Args& a, std::ostream& out) {
  const PipelineConfig cfg = config_for(a, true);
  const ModelSection& ms = section(cfg.model, "model");
  const DatasetManifest manifest = load_manifest(a.manifest);
  if (manifest.subjects.empty()) throw ConfigError("manifest: no subjects");
  bool any = false;
  for (const ManifestEntry& e : manifest.subjects) any |= e.split == Split::Train && e.high_res_mesh.has_value();
  if (!any) throw ConfigError("manifest: no train subject with high_res_mesh_path");

  const std::vector<LoadedPair> train_set = load_pairs(manifest, Split::Train, cfg.io.unit_scale);
  if (train_set.empty()) throw MeshError("train: every training pair was skipped");
  const std::vector<LoadedPair> val_set = load_pairs(manifest, Split::Val, cfg.io.unit_scale);
  std::vector<nn::TrainingPair> pairs;
  for (const LoadedPair& p : train_set) pairs.push_back(nn::make_pair(p.coarse, p.truth, ms.max_normal_angle_deg));

  std::vector<double> val_hd;
  auto on_epoch = [&](const nn::EpochRecord& r, const nn::SubdivNetParams& params) {
    out << "epoch " << r.epoch << " loss " << fmt("%.10g", r.mean_loss);
    if (!val_set.empty()) {
      double worst = 0.0;
      for (const LoadedPair& v : val_set)
        worst = std::max(worst, hausdorff(nn::upsample(params, v.coarse, ms.levels), v.truth).symmetric);
      val_hd.push_back(worst);
      out << " val_hausdorff " << fmt("%.10g", worst);
    }
    out << "\n";
    log::info("train", "epoch done", "epoch=" + std::to_string(r.epoch) + " seconds=" + fmt("%.3f", r.wall_seconds));
  };
  const nn::SubdivNetParams init = nn::SubdivNetParams::random(ms.feature_dim, ms.hidden, ms.levels, cfg.seed);
  const nn::TrainResult result = nn::train(pairs, init, ms.train, on_epoch);
  nn::save_model(a.model, result.params);

  // Wall-clock time stays out of the file so reruns are byte-identical.
  std::string csv = val_set.empty() ? "epoch,mean_loss\n" : "epoch,mean_loss,val_hausdorff\n";
  for (std::size_t i = 0; i < result.history.size(); ++i) {
    csv += std::to_string(result.history[i].epoch) + "," + fmt("%.17g", result.history[i].mean_loss);
    if (!val_set.empty()) csv += "," + fmt("%.17g", val_hd[i]);
    csv += "\n";
  }
  write_file(a.loss, csv);
  return kExitOk;
}

int cmd_upsample(const Args& a, std::ostream& out) {
  const PipelineConfig cfg = config_for(a, false);
  const nn::SubdivNetParams params = nn::load_model(a.model);
  const int levels = a.levels.value_or(params.levels);
  if (levels < 1) throw InvalidArgument("upsample: --levels must be >= 1");
  const TriangleMesh in = load_mesh(a.in, cfg.io.unit_scale);
  const TriangleMesh up = nn::upsample(params, in, levels);
  save_mesh(up, a.out, cfg.io.unit_scale);
  out << "input: " << counts(in) << "\noutput: " << counts(up) << "\n";
  if (!a.truth.empty()) {
    const HausdorffResult h = hausdorff(up, load_mesh(a.truth, cfg.io.unit_scale));
    out << "hausdorff_forward: " << fmt("%.10g", h.forward) << "\nhausdorff_backward: " << fmt("%.10g", h.backward)
        << "\nhausdorff_symmetric: " << fmt("%.10g", h.symmetric) << "\n";
  }
  return kExitOk;
}

HrtfSet with_hrir(const HrtfSet& set, const BemSection& b) {
  if (b.hrir_taps == 0) return set;
  if (!set.failed_frequencies_hz.empty()) {
    log::warn("hrir", "impulse responses skipped: frequency grid has gaps");
    return set;
  }
  return hrtf_to_hrir(set, b.hrir_sample_rate, b.hrir_taps);
}

void print_oracle_deltas(const HrtfSet& bem, const BemSection& b, std::ostream& out) {
  bem::AcousticConfig ac = b.acoustic;
  ac.frequencies = bem.frequencies;
  EvalGrid grid;
  grid.directions = bem.directions;
  grid.radius = bem.radius;
  const HrtfSet ref = analytic_sphere_hrtf(b.sphere, ac, grid);
  for (std::size_t f = 0; f < bem.frequency_count(); ++f) {
    double db = 0.0, deg = 0.0;
    for (std::size_t d = 0; d < bem.direction_count(); ++d)
      for (Ear e : {Ear::Left, Ear::Right}) {
        const Complex x = bem.at(d, e, f), y = ref.at(d, e, f);
        db = std::max(db, std::abs(20.0 * std::log10(std::abs(x) / std::abs(y))));
        deg = std::max(deg, std::abs(std::arg(x / y)) * 180.0 / std::numbers::pi);
      }
    out << "oracle " << fmt("%g", bem.frequencies[f]) << " Hz: max magnitude error " << fmt("%.4f", db)
        << " dB, max phase error " << fmt("%.3f", deg) << " deg\n";
  }
}

int cmd_solve(const Args& a, std::ostream& out) {
  const PipelineConfig cfg = config_for(a, true);
  const BemSection& b = section(cfg.bem, "bem");
  if (a.sphere_fixture == !a.mesh.empty()) throw ConfigError("solve: give exactly one of --mesh and --sphere-fixture");
  const TriangleMesh mesh = a.sphere_fixture ? bem::sphere_fixture(b.sphere_level, b.sphere.radius,
                                                                   b.sphere.patch_half_angle_deg, b.sphere.left,
                                                                   b.sphere.right)
                                             : load_mesh(a.mesh, cfg.io.unit_scale);
  out << "mesh: " << counts(mesh) << "\n";
  const HrtfSet set = with_hrir(synthesize_hrtf(mesh, b.acoustic, b.grid), b);
  save_hrtf(a.out, set, b.encoding);
  out << "solved " << set.frequency_count() << " of " << b.acoustic.frequencies.size() << " frequencies, "
      << set.direction_count() << " directions\n";
  if (a.sphere_fixture || a.oracle) print_oracle_deltas(set, b, out);
  return set.failed_frequencies_hz.empty() ? kExitOk : kExitFailure;
}

int cmd_oracle_sphere(const Args& a, std::ostream& out) {
  const PipelineConfig cfg = config_for(a, true);
  const BemSection& b = section(cfg.bem, "bem");
  const HrtfSet set = with_hrir(analytic_sphere_hrtf(b.sphere, b.acoustic, b.grid), b);
  save_hrtf(a.out, set, b.encoding);
  out << "series response: " << set.frequency_count() << " frequencies, " << set.direction_count()
      << " directions\n";
  return kExitOk;
}

// Conditions sharing a label are averaged over subjects.
int cmd_eval(const Args& a, std::ostream& out) {
  const PipelineConfig cfg = config_for(a, false);
  const metrics::CompareConfig cc = cfg.metrics ? cfg.metrics->compare : metrics::CompareConfig{};
  if (a.refs.size() != 1 && a.refs.size() != a.tests.size())
    throw ConfigError("eval: give one --ref or one per --test");
  if (!a.labels.empty() && a.labels.size() != a.tests.size())
    throw ConfigError("eval: give one --label per --test");

  std::vector<std::string> order;
  std::map<std::string, std::vector<metrics::ComparisonReport>> groups;
  for (std::size_t i = 0; i < a.tests.size(); ++i) {
    const std::string& ref_path = a.refs.size() == 1 ? a.refs[0] : a.refs[i];
    const std::string label = a.labels.empty() ? std::filesystem::path(a.tests[i]).stem().string() : a.labels[i];
    metrics::ComparisonReport r = metrics::compare(load_hrtf(a.tests[i]), load_hrtf(ref_path), cc,
                                                   {{"label", label}, {"test", a.tests[i]}, {"reference", ref_path}});
    log::info("eval", "compared",
              "label=\"" + label + "\" matched_directions=" + r.metadata["matched_directions"] +
                  " dropped_test_bins=" + r.metadata["dropped_test_bins"] +
                  " dropped_ref_bins=" + r.metadata["dropped_ref_bins"]);
    if (!groups.count(label)) order.push_back(label);
    groups[label].push_back(std::move(r));
  }

  std::vector<metrics::ComparisonReport> reports;
  for (const std::string& label : order) {
    std::vector<metrics::ComparisonReport>& g = groups[label];
    if (g.size() == 1) {
      reports.push_back(std::move(g[0]));
      continue;
    }
    std::vector<metrics::LsdCurve> curves;
    for (const metrics::ComparisonReport& r : g) curves.push_back(r.lsd);
    metrics::ComparisonReport avg;
    avg.lsd = metrics::average_lsd(curves);
    avg.metadata = {{"label", label},
                    {"subjects", std::to_string(g.size())},
                    {"subject_averaging", "mean of per-subject LSD curves"},
                    {"direction_weighting", "uniform"},
                    {"lsd_summary_db", fmt("%.10g", avg.lsd.summary_db)}};
    reports.push_back(std::move(avg));
  }
  metrics::emit_report(reports, a.out);
  for (const metrics::ComparisonReport& r : reports)
    out << r.metadata.at("label") << ": LSD " << fmt("%.4f", r.lsd.summary_db) << " dB\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out) {
  CLI::App app{"hrtf-forge: mesh preparation, neural subdivision, BEM HRTF synthesis and evaluation"};
  app.require_subcommand(1);
  Args a;
  app.add_option("--seed", a.seed, "Seed for every random choice (overrides the config)");
  app.add_option("--threads", a.threads, "Worker threads (results do not depend on it)")->check(CLI::PositiveNumber);

  auto config_opt = [&](CLI::App* s, bool required) {
    auto* o = s->add_option("--config", a.config, "Pipeline config (JSON)")->check(CLI::ExistingFile);
    if (required) o->required();
  };
  auto* validate_cmd = app.add_subcommand("validate", "Check that a mesh is a closed genus-0 manifold");
  validate_cmd->add_option("mesh", a.in, "STL or OBJ mesh")->required()->check(CLI::ExistingFile);
  config_opt(validate_cmd, false);

  auto* prep_cmd = app.add_subcommand("prep", "Clean, align, behead, grade and label a head mesh");
  config_opt(prep_cmd, true);
  prep_cmd->add_option("--in", a.in)->required()->check(CLI::ExistingFile);
  prep_cmd->add_option("--out", a.out, "Labeled OBJ output")->required();

  auto* train_cmd = app.add_subcommand("train", "Train the subdivision network on a dataset manifest");
  config_opt(train_cmd, true);
  train_cmd->add_option("--manifest", a.manifest)->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--model", a.model, "Model output")->required();
  train_cmd->add_option("--loss", a.loss, "Loss history CSV output")->required();

  auto* upsample_cmd = app.add_subcommand("upsample", "Refine a coarse mesh with a trained model");
  config_opt(upsample_cmd, false);
  upsample_cmd->add_option("--model", a.model)->required()->check(CLI::ExistingFile);
  upsample_cmd->add_option("--in", a.in)->required()->check(CLI::ExistingFile);
  upsample_cmd->add_option("--out", a.out)->required();
  upsample_cmd->add_option("--levels", a.levels, "Subdivision levels (default: the model's)");
  upsample_cmd->add_option("--truth", a.truth, "Ground-truth mesh for a Hausdorff report")->check(CLI::ExistingFile);

  auto* solve_cmd = app.add_subcommand("solve", "Synthesize HRTFs of a labeled mesh with the BEM");
  config_opt(solve_cmd, true);
  solve_cmd->add_option("--mesh", a.mesh, "Labeled mesh (OBJ groups)")->check(CLI::ExistingFile);
  solve_cmd->add_flag("--sphere-fixture", a.sphere_fixture, "Solve the configured sphere instead of a mesh");
  solve_cmd->add_flag("--oracle", a.oracle, "Print deltas against the sphere series");
  solve_cmd->add_option("--out", a.out, "HRTF-JSON output")->required();

  auto* eval_cmd = app.add_subcommand("eval", "Compare HRTF sets and write LSD reports");
  config_opt(eval_cmd, false);
  eval_cmd->add_option("--test", a.tests, "Test HRTF-JSON (repeatable)")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--ref", a.refs, "Reference HRTF-JSON (one, or one per --test)")->required()->check(
      CLI::ExistingFile);
  eval_cmd->add_option("--label", a.labels, "Condition label per --test; equal labels are averaged");
  eval_cmd->add_option("--out", a.out, "Report directory")->required();

  auto* oracle_cmd = app.add_subcommand("oracle-sphere", "Write the analytic sphere response as HRTF-JSON");
  config_opt(oracle_cmd, true);
  oracle_cmd->add_option("--out", a.out)->required();

  for (CLI::App* s : app.get_subcommands({})) s->fallthrough();

  std::vector<const char*> argv;
  for (const std::string& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, std::cerr);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (a.threads > 0) set_thread_count(a.threads);

  try {
    if (validate_cmd->parsed()) return cmd_validate(a, out);
    if (prep_cmd->parsed()) return cmd_prep(a, out);
    if (train_cmd->parsed()) return cmd_train(a, out);
    if (upsample_cmd->parsed()) return cmd_upsample(a, out);
    if (solve_cmd->parsed()) return cmd_solve(a, out);
    if (eval_cmd->parsed()) return cmd_eval(a, out);
    return cmd_oracle_sphere(a, out);
  } catch (const ConfigError& e) {
    log::error("cli", e.what());
    return kExitUsage;
  } catch (const ParseError& e) {
    log::error("cli", e.what());
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    log::error("cli", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    log::error("cli", e.what());
    return kExitFailure;
  }
}

}  // namespace hforge::pipeline
